//! Complete linear systems `|D|` and the semimodules `R(D)` on a lattice
//! subdivision of a metric graph.

pub mod chip_firing;
pub mod extremal;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::automorphism::FiniteGroup;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::metric_graph::{subdivide, Lattice, Model, Point, Subgraph};
use crate::rational::{divides, fmt_q, gcd_q, q, zero, Q};
use crate::rational_fn::RationalFunction;
use crate::trop_algebra::TropScalar;

/// Cap on the number of candidate divisors examined by any enumeration.
pub const CANDIDATE_BUDGET: u128 = 20_000_000;

/// Lattice granularity from edge lengths, support offsets and extra
/// constraints, divided by `refine`.
pub fn default_granularity(m: &Model, d: &Divisor, extra: &[Q], refine: u32) -> Q {
    let mut h = zero();
    for e in m.edges() {
        h = gcd_q(&h, &e.length);
    }
    for (p, _) in d.iter() {
        if let Point::OnEdge { offset, .. } = p {
            h = gcd_q(&h, offset);
        }
    }
    for x in extra {
        h = gcd_q(&h, x);
    }
    h / q(refine.max(1) as i64)
}

/// The constraints a granularity must satisfy, with a description of each.
pub fn granularity_constraints(m: &Model, d: &Divisor, extra: &[Q]) -> Vec<(Q, String)> {
    let mut out: Vec<(Q, String)> = m
        .edges()
        .iter()
        .map(|e| (e.length.clone(), format!("the length {} of edge `{}`", fmt_q(&e.length), e.name)))
        .collect();
    for (p, _) in d.iter() {
        if let Point::OnEdge { offset, .. } = p {
            out.push((offset.clone(), format!("the position of {}", m.format_point(p))));
        }
    }
    for x in extra {
        out.push((x.clone(), format!("the group constraint {}", fmt_q(x))));
    }
    out
}

/// Checks that `h` divides every constraint.
pub fn check_granularity(m: &Model, d: &Divisor, extra: &[Q], h: &Q) -> Result<()> {
    if *h <= zero() {
        return Err(Error::Granularity { h: h.clone(), what: "anything (must be positive)".into() });
    }
    for (x, what) in granularity_constraints(m, d, extra) {
        if x != zero() && !divides(h, &x) {
            return Err(Error::Granularity { h: h.clone(), what });
        }
    }
    Ok(())
}

/// Extremals of `R(D)` normalized to maximum 0, sorted by serialization,
/// with the divisors `D + div(f)`.
#[derive(Clone, Debug)]
pub struct GeneratingSet {
    pub functions: Vec<RationalFunction>,
    pub divisors: Vec<Divisor>,
    pub check: GenerationCheck,
}

/// Outcome of re-expressing every enumerated member of `|D|` through the
/// generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenerationCheck {
    pub members: usize,
    pub failures: usize,
}

impl GenerationCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl GeneratingSet {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Index of `f` up to an additive constant.
    pub fn position(&self, f: &RationalFunction) -> Option<usize> {
        let f = f.normalized().ok()?;
        self.functions.iter().position(|g| *g == f)
    }
}

/// A divisor `D` on a model together with a lattice fine enough to carry it.
#[derive(Clone, Debug)]
pub struct LinearSystemContext {
    model: Arc<Model>,
    divisor: Divisor,
    lattice: Lattice,
    base: usize,
    dense: Vec<i64>,
    reduced: Vec<i64>,
    script: Vec<i64>,
}

impl LinearSystemContext {
    pub fn new(model: Arc<Model>, divisor: Divisor, h: &Q) -> Result<Self> {
        divisor.check_on(&model)?;
        check_granularity(&model, &divisor, &[], h)?;
        let lattice = subdivide(&model, h)?;
        let dense = lattice.to_dense(&divisor, &model)?;
        let base = 0;
        let (reduced, script) = chip_firing::reduce(&lattice, &dense, base);
        Ok(Self { model, divisor, lattice, base, dense, reduced, script })
    }

    /// Context at the default granularity divided by `refine`.
    pub fn with_refinement(model: Arc<Model>, divisor: Divisor, extra: &[Q], refine: u32) -> Result<Self> {
        let h = default_granularity(&model, &divisor, extra, refine);
        Self::new(model, divisor, &h)
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn h(&self) -> &Q {
        self.lattice.h()
    }

    /// The reduction basepoint: the lowest-index lattice vertex.
    pub fn basepoint(&self) -> &Point {
        self.lattice.point(self.base)
    }

    /// Same model and lattice, different divisor.
    pub fn with_divisor(&self, divisor: Divisor) -> Result<Self> {
        divisor.check_on(&self.model)?;
        let dense = self.lattice.to_dense(&divisor, &self.model).map_err(|_| Error::Granularity {
            h: self.h().clone(),
            what: format!("the support of {}", divisor.display(&self.model)),
        })?;
        let (reduced, script) = chip_firing::reduce(&self.lattice, &dense, self.base);
        Ok(Self {
            model: self.model.clone(),
            divisor,
            lattice: self.lattice.clone(),
            base: self.base,
            dense,
            reduced,
            script,
        })
    }

    fn dense(&self, e: &Divisor) -> Result<Vec<i64>> {
        e.check_on(&self.model)?;
        self.lattice.to_dense(e, &self.model).map_err(|_| Error::Granularity {
            h: self.h().clone(),
            what: format!("the support of {}", e.display(&self.model)),
        })
    }

    /// `f = -inf` or `D + div(f) ≥ 0`.
    pub fn belongs(&self, f: &RationalFunction) -> bool {
        if f.is_bottom() {
            return true;
        }
        if **f.model() != *self.model {
            return false;
        }
        f.div().map(|d| (&self.divisor + &d).is_effective()).unwrap_or(false)
    }

    /// Every boundary point of `s` has outdegree at most its coefficient in `e`.
    pub fn can_fire(&self, s: &Subgraph, e: &Divisor) -> bool {
        s.boundary(&self.model).iter().all(|(p, out)| *out as i64 <= e.coefficient(p))
    }

    pub fn is_extremal(&self, f: &RationalFunction) -> Result<bool> {
        if f.is_bottom() {
            return Err(Error::BottomFunction);
        }
        if !self.belongs(f) {
            return Err(Error::NotInLinearSystem);
        }
        let e = &self.divisor + &f.div()?;
        extremal::extremal_for(&self.model, &e)
    }

    /// The reduced divisor equivalent to `e` with respect to the lattice
    /// point `base`, and the firing script that produces it.
    pub fn reduced_divisor(&self, e: &Divisor, base: &Point) -> Result<(Divisor, Vec<i64>)> {
        let dense = self.dense(e)?;
        let b = self.lattice.index_of(base).ok_or_else(|| Error::NotLattice(self.model.format_point(base)))?;
        let (red, z) = chip_firing::reduce(&self.lattice, &dense, b);
        Ok((self.lattice.from_dense(&red), z))
    }

    pub fn equivalent(&self, e1: &Divisor, e2: &Divisor) -> Result<bool> {
        let (a, b) = (self.dense(e1)?, self.dense(e2)?);
        Ok(chip_firing::reduce(&self.lattice, &a, self.base).0 == chip_firing::reduce(&self.lattice, &b, self.base).0)
    }

    /// `f` with `D + div(f) = e`, if `e ~ D`.
    pub fn solve_equivalence(&self, e: &Divisor) -> Result<Option<RationalFunction>> {
        let dense = self.dense(e)?;
        Ok(self.solve_dense(&dense))
    }

    fn solve_dense(&self, dense: &[i64]) -> Option<RationalFunction> {
        let (red, z) = chip_firing::reduce(&self.lattice, dense, self.base);
        if red != self.reduced {
            return None;
        }
        let values: Vec<Q> = self.script.iter().zip(&z).map(|(a, b)| self.h() * q(a - b)).collect();
        let f = RationalFunction::from_lattice_values(self.model.clone(), &self.lattice, &values)
            .expect("lattice potentials have integer slopes");
        Some(f)
    }

    /// `|D| = ∅`.
    pub fn is_empty_system(&self) -> bool {
        self.divisor.degree() < 0 || self.reduced[self.base] < 0
    }

    /// Effective lattice divisors of degree `deg D` equivalent to `D`, as
    /// dense vectors.
    pub fn lattice_members(&self) -> Result<Vec<Vec<i64>>> {
        if self.is_empty_system() {
            return Err(Error::EmptySystem);
        }
        let d = self.divisor.degree() as usize;
        let n = self.lattice.len();
        check_budget(n, d)?;
        let firsts: Vec<usize> = (0..n).collect();
        let members = if d == 0 {
            vec![vec![0i64; n]]
        } else {
            // Partition on the smallest vertex of the multiset.
            firsts
                .par_iter()
                .flat_map_iter(|&first| {
                    let mut found = Vec::new();
                    let mut chips = vec![0i64; n];
                    chips[first] = 1;
                    for_each_multiset(n, d - 1, first, &mut chips, &mut |c| {
                        if chip_firing::reduce(&self.lattice, c, self.base).0 == self.reduced {
                            found.push(c.to_vec());
                        }
                    });
                    found
                })
                .collect()
        };
        Ok(members)
    }

    /// All lattice-representable extremals of `R(D)` up to additive constants.
    pub fn enumerate_extremals(&self) -> Result<GeneratingSet> {
        let members = self.lattice_members()?;
        let functions: Vec<(RationalFunction, Divisor)> = members
            .par_iter()
            .map(|c| {
                let f = self.solve_dense(c).expect("member is equivalent").normalized().expect("finite");
                (f, self.lattice.from_dense(c))
            })
            .collect();
        let flags: Vec<bool> = functions
            .par_iter()
            .map(|(_, e)| extremal::extremal_for(&self.model, e))
            .collect::<Result<_>>()?;
        let mut uniq: BTreeMap<String, (RationalFunction, Divisor)> = BTreeMap::new();
        for ((f, e), ok) in functions.iter().zip(&flags) {
            if *ok {
                uniq.entry(f.to_text()).or_insert_with(|| (f.clone(), e.clone()));
            }
        }
        let (gens, divisors): (Vec<_>, Vec<_>) = uniq.into_values().unzip();
        let failures = functions
            .par_iter()
            .filter(|(f, _)| !generated_by(f, &gens))
            .count();
        Ok(GeneratingSet {
            functions: gens,
            divisors,
            check: GenerationCheck { members: functions.len(), failures },
        })
    }

    /// Some `G`-invariant member of `|D|` at this granularity, preferring `D`.
    pub fn invariant_representative(&self, g: &FiniteGroup) -> Result<Option<Divisor>> {
        if *g.model() != *self.model {
            return Err(Error::ModelMismatch("group acts on a different model".into()));
        }
        if self.is_empty_system() {
            return Ok(None);
        }
        if self.divisor.is_effective() && crate::divisor::is_invariant(&self.divisor, g)? {
            return Ok(Some(self.divisor.clone()));
        }
        let Some(orbits) = lattice_orbits(&self.lattice, g) else {
            return Ok(None);
        };
        let mut chips = vec![0i64; self.lattice.len()];
        let target = self.divisor.degree();
        let mut found = None;
        search_orbit_sums(&orbits, 0, target, &mut chips, &mut |c| {
            if chip_firing::reduce(&self.lattice, c, self.base).0 == self.reduced {
                found = Some(self.lattice.from_dense(c));
                true
            } else {
                false
            }
        });
        Ok(found)
    }

    /// Extremals of `R(D)` for `G`-invariant `D`, checked to be permuted by `G`.
    pub fn invariant_generating_set(&self, g: &FiniteGroup) -> Result<GeneratingSet> {
        if !crate::divisor::is_invariant(&self.divisor, g)? {
            return Err(Error::NotInvariant);
        }
        let set = self.enumerate_extremals()?;
        for (k, f) in set.functions.iter().enumerate() {
            for sigma in g.elements() {
                if set.position(&f.compose(sigma)?).is_none() {
                    return Err(Error::SetNotInvariant { k });
                }
            }
        }
        Ok(set)
    }

    /// Lattice rank: the largest `r` with `|D - E| ≠ ∅` for every effective
    /// lattice divisor `E` of degree `r`; `-1` for empty `|D|`.
    pub fn rank(&self) -> Result<i64> {
        if self.is_empty_system() {
            return Ok(-1);
        }
        let n = self.lattice.len();
        let mut r = 0i64;
        while r < self.divisor.degree() {
            let s = (r + 1) as usize;
            check_budget(n, s)?;
            let all_ok = (0..n).into_par_iter().all(|first| {
                let mut chips = self.dense.clone();
                chips[first] -= 1;
                let mut ok = true;
                for_each_multiset_neg(n, s - 1, first, &mut chips, &mut |c| {
                    if ok && chip_firing::reduce(&self.lattice, c, self.base).0[self.base] < 0 {
                        ok = false;
                    }
                });
                ok
            });
            if !all_ok {
                break;
            }
            r += 1;
        }
        Ok(r)
    }
}

fn check_budget(n: usize, d: usize) -> Result<()> {
    // C(n + d - 1, d)
    let mut c: u128 = 1;
    for i in 0..d as u128 {
        c = c * (n as u128 + i) / (i + 1);
        if c > CANDIDATE_BUDGET {
            return Err(Error::SearchTooLarge(c.min(usize::MAX as u128) as usize));
        }
    }
    Ok(())
}

/// Adds `left` further chips at vertices `≥ from` in every possible way.
fn for_each_multiset(n: usize, left: usize, from: usize, chips: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
    if left == 0 {
        visit(chips);
        return;
    }
    for v in from..n {
        chips[v] += 1;
        for_each_multiset(n, left - 1, v, chips, visit);
        chips[v] -= 1;
    }
}

/// Like [`for_each_multiset`] but removes chips.
fn for_each_multiset_neg(n: usize, left: usize, from: usize, chips: &mut Vec<i64>, visit: &mut dyn FnMut(&[i64])) {
    if left == 0 {
        visit(chips);
        return;
    }
    for v in from..n {
        chips[v] -= 1;
        for_each_multiset_neg(n, left - 1, v, chips, visit);
        chips[v] += 1;
    }
}

/// Orbits of lattice vertices, or `None` if some element leaves the lattice.
pub fn lattice_orbits(lattice: &Lattice, g: &FiniteGroup) -> Option<Vec<Vec<usize>>> {
    let mut seen = vec![false; lattice.len()];
    let mut orbits = Vec::new();
    for i in 0..lattice.len() {
        if seen[i] {
            continue;
        }
        let mut orbit = BTreeSet::new();
        for sigma in g.elements() {
            let j = lattice.index_of(&sigma.act(lattice.point(i)))?;
            orbit.insert(j);
        }
        for &j in &orbit {
            seen[j] = true;
        }
        orbits.push(orbit.into_iter().collect());
    }
    Some(orbits)
}

/// Invariant effective divisors of degree `left` as sums of orbits; stops
/// when `visit` returns true.
fn search_orbit_sums(
    orbits: &[Vec<usize>],
    k: usize,
    left: i64,
    chips: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    if left == 0 {
        return visit(chips);
    }
    if k == orbits.len() {
        return false;
    }
    let size = orbits[k].len() as i64;
    let mut c = left / size;
    loop {
        for &v in &orbits[k] {
            chips[v] += c;
        }
        let done = search_orbit_sums(orbits, k + 1, left - c * size, chips, visit);
        for &v in &orbits[k] {
            chips[v] -= c;
        }
        if done {
            return true;
        }
        if c == 0 {
            return false;
        }
        c -= 1;
    }
}

/// `f = ⊕_k (c_k ⊙ f_k)` with `c_k = min(f - f_k)`.
pub fn generated_by(f: &RationalFunction, gens: &[RationalFunction]) -> bool {
    let mut acc = RationalFunction::bottom(f.model().clone());
    for g in gens {
        let Ok(c) = f.min_difference(g) else {
            return false;
        };
        acc = match acc.trop_sum(&g.scalar_shift(&TropScalar::Finite(c))) {
            Ok(a) => a,
            Err(_) => return false,
        };
    }
    acc == *f
}

/// Some effective lattice divisor of degree 2 has lattice rank at least 1.
pub fn is_hyperelliptic(model: &Arc<Model>, h: &Q) -> Result<bool> {
    let g = model.genus();
    if g < 2 {
        return Err(Error::GenusTooSmall(g));
    }
    let ctx = LinearSystemContext::new(model.clone(), Divisor::zero(), h)?;
    let n = ctx.lattice.len();
    // One representative per class of degree-2 divisors.
    let mut classes: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
    for a in 0..n {
        for b in a..n {
            let mut c = vec![0i64; n];
            c[a] += 1;
            c[b] += 1;
            let red = chip_firing::reduce(&ctx.lattice, &c, ctx.base).0;
            classes.entry(red).or_insert(c);
        }
    }
    let reps: Vec<Vec<i64>> = classes.into_values().collect();
    Ok(reps.par_iter().any(|c| {
        (0..n).all(|p| {
            let mut d = c.clone();
            d[p] -= 1;
            chip_firing::reduce(&ctx.lattice, &d, ctx.base).0[ctx.base] >= 0
        })
    }))
}

pub fn belongs(ctx: &LinearSystemContext, f: &RationalFunction) -> bool {
    ctx.belongs(f)
}

pub fn can_fire(ctx: &LinearSystemContext, s: &Subgraph, e: &Divisor) -> bool {
    ctx.can_fire(s, e)
}

pub fn is_extremal(ctx: &LinearSystemContext, f: &RationalFunction) -> Result<bool> {
    ctx.is_extremal(f)
}

pub fn equivalent(ctx: &LinearSystemContext, e1: &Divisor, e2: &Divisor) -> Result<bool> {
    ctx.equivalent(e1, e2)
}

pub fn solve_equivalence(ctx: &LinearSystemContext, e: &Divisor) -> Result<Option<RationalFunction>> {
    ctx.solve_equivalence(e)
}

pub fn enumerate_extremals(ctx: &LinearSystemContext) -> Result<GeneratingSet> {
    ctx.enumerate_extremals()
}

pub fn rank(ctx: &LinearSystemContext) -> Result<i64> {
    ctx.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{compute_aut, finite_subgroup_of_circle, CircleMap};
    use crate::metric_graph::fixtures::*;
    use crate::rational::frac;

    fn interval_ctx(d: Divisor) -> LinearSystemContext {
        LinearSystemContext::new(Arc::new(interval()), d, &frac(1, 2)).unwrap()
    }

    fn pt(m: &Model, e: usize, t: Q) -> Point {
        m.point_on_edge(e, t).unwrap()
    }

    #[test]
    fn membership() {
        let ctx = interval_ctx(Divisor::point(Point::Vertex(0)));
        let m = ctx.model().clone();
        let f1 = RationalFunction::new(m.clone(), vec![vec![(q(0), q(1)), (q(1), q(0))]]).unwrap();
        assert!(ctx.belongs(&f1));
        assert!(ctx.belongs(&RationalFunction::constant(m.clone(), q(0))));
        assert!(ctx.belongs(&RationalFunction::bottom(m.clone())));
        let v = RationalFunction::new(m.clone(), vec![vec![(q(0), q(0)), (frac(1, 2), q(1)), (q(1), q(0))]]).unwrap();
        assert!(!ctx.belongs(&v));
    }

    #[test]
    fn firing_subgraphs() {
        let ctx = interval_ctx(Divisor::point(Point::Vertex(1)));
        let m = ctx.model().clone();
        let y = Divisor::point(Point::Vertex(1));
        assert!(ctx.can_fire(&Subgraph::point(&m, &Point::Vertex(1)), &y));
        let half = Subgraph::new(&m, vec![vec![(frac(1, 2), q(1))]], Default::default()).unwrap();
        assert!(!ctx.can_fire(&half, &y));
        assert!(ctx.can_fire(&Subgraph::full(&m), &y));
    }

    #[test]
    fn equivalence_and_solving() {
        let ctx = interval_ctx(Divisor::point(Point::Vertex(0)));
        let m = ctx.model().clone();
        let x = Divisor::point(Point::Vertex(0));
        let z = Divisor::point(pt(&m, 0, frac(1, 2)));
        let y = Divisor::point(Point::Vertex(1));
        assert!(ctx.equivalent(&x, &z).unwrap());
        assert!(!ctx.equivalent(&x, &Divisor::from_pairs([(Point::Vertex(0), 2)])).unwrap());
        assert!(ctx.equivalent(&z, &z).unwrap());
        let f = ctx.solve_equivalence(&y).unwrap().unwrap();
        assert_eq!(&x + &f.div().unwrap(), y);
        assert!(f.div().unwrap() == &y - &x);
        let c = ctx.solve_equivalence(&x).unwrap().unwrap();
        assert!(c.div().unwrap().is_zero());
        assert!(ctx.solve_equivalence(&Divisor::from_pairs([(Point::Vertex(0), 2)])).unwrap().is_none());
        let third = Divisor::point(pt(&m, 0, frac(1, 3)));
        assert!(matches!(ctx.equivalent(&x, &third), Err(Error::Granularity { .. })));
    }

    #[test]
    fn extremals_on_the_interval() {
        let set = interval_ctx(Divisor::point(Point::Vertex(0))).enumerate_extremals().unwrap();
        assert_eq!(set.len(), 2);
        assert!(set.check.passed());
        let m = Arc::new(interval());
        let z = pt(&m, 0, frac(1, 2));
        let set = interval_ctx(Divisor::from_pairs([(z, 2)])).enumerate_extremals().unwrap();
        assert_eq!(set.len(), 3);
        assert!(set.check.passed());
        let zero_set = interval_ctx(Divisor::zero()).enumerate_extremals().unwrap();
        assert_eq!(zero_set.len(), 1);
        assert_eq!(zero_set.functions[0], RationalFunction::constant(m, q(0)));
    }

    #[test]
    fn empty_systems() {
        let neg = interval_ctx(Divisor::from_pairs([(Point::Vertex(0), -1)]));
        assert_eq!(neg.enumerate_extremals().unwrap_err(), Error::EmptySystem);
        assert_eq!(neg.rank().unwrap(), -1);
        let c = Arc::new(circle2());
        let d = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), -1)]);
        let ctx = LinearSystemContext::new(c, d, &q(1)).unwrap();
        assert_eq!(ctx.enumerate_extremals().unwrap_err(), Error::EmptySystem);
    }

    #[test]
    fn extremality() {
        let ctx = interval_ctx(Divisor::point(Point::Vertex(0)));
        let m = ctx.model().clone();
        let f1 = RationalFunction::new(m.clone(), vec![vec![(q(0), q(1)), (q(1), q(0))]]).unwrap();
        assert!(ctx.is_extremal(&f1).unwrap());
        let z = pt(&m, 0, frac(1, 2));
        let ctx2 = interval_ctx(Divisor::from_pairs([(z, 2)]));
        let g3 = RationalFunction::new(m.clone(), vec![vec![(q(0), frac(-1, 2)), (frac(1, 2), q(0)), (q(1), frac(-1, 2))]])
            .unwrap();
        assert!(ctx2.is_extremal(&g3).unwrap());
        let xy = interval_ctx(Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]));
        let vee = RationalFunction::new(m.clone(), vec![vec![(q(0), q(0)), (frac(1, 2), frac(-1, 2)), (q(1), q(0))]])
            .unwrap();
        assert!(!xy.is_extremal(&vee).unwrap());
        assert_eq!(ctx.is_extremal(&vee).unwrap_err(), Error::NotInLinearSystem);
    }

    #[test]
    fn invariant_representatives() {
        let m = Arc::new(interval());
        let g = compute_aut(&m).unwrap();
        let ctx = interval_ctx(Divisor::point(Point::Vertex(0)));
        let z = Divisor::point(pt(&m, 0, frac(1, 2)));
        assert_eq!(ctx.invariant_representative(&g).unwrap(), Some(z.clone()));
        assert_eq!(ctx.with_divisor(z.clone()).unwrap().invariant_representative(&g).unwrap(), Some(z));
        let c = Arc::new(circle2());
        let sigma = finite_subgroup_of_circle(&c, &[CircleMap::Rotate(q(2))]).unwrap();
        let d = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]);
        let ctx = LinearSystemContext::new(c, d.clone(), &q(1)).unwrap();
        assert_eq!(ctx.invariant_representative(&sigma).unwrap(), Some(d));
    }

    #[test]
    fn invariant_generating_sets() {
        let m = Arc::new(interval());
        let g = compute_aut(&m).unwrap();
        let z = Divisor::point(pt(&m, 0, frac(1, 2)));
        let set = interval_ctx(z).invariant_generating_set(&g).unwrap();
        assert_eq!(set.len(), 2);
        let iota = &g.elements()[1];
        assert_eq!(set.position(&set.functions[0].compose(iota).unwrap()), Some(1));
        assert_eq!(
            interval_ctx(Divisor::point(Point::Vertex(0))).invariant_generating_set(&g).unwrap_err(),
            Error::NotInvariant
        );
    }

    #[test]
    fn ranks() {
        assert_eq!(interval_ctx(Divisor::zero()).rank().unwrap(), 0);
        let c = Arc::new(circle2());
        let d = Divisor::from_pairs([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]);
        assert_eq!(LinearSystemContext::new(c, d, &q(1)).unwrap().rank().unwrap(), 1);
        let k = Arc::new(k4());
        let canon = k.canonical_divisor();
        assert_eq!(LinearSystemContext::new(k, canon, &q(1)).unwrap().rank().unwrap(), 2);
    }

    #[test]
    fn hyperellipticity() {
        assert!(is_hyperelliptic(&Arc::new(theta([1, 1, 1])), &q(1)).unwrap());
        assert!(!is_hyperelliptic(&Arc::new(k4()), &q(1)).unwrap());
        assert_eq!(is_hyperelliptic(&Arc::new(interval()), &q(1)).unwrap_err(), Error::GenusTooSmall(0));
    }

    #[test]
    fn default_granularities() {
        let m = theta([2, 4, 6]);
        assert_eq!(default_granularity(&m, &Divisor::zero(), &[], 1), q(2));
        let d = Divisor::point(m.point_on_edge(0, q(1)).unwrap());
        assert_eq!(default_granularity(&m, &d, &[], 1), q(1));
        assert_eq!(default_granularity(&m, &d, &[], 4), frac(1, 4));
        assert!(check_granularity(&m, &d, &[], &q(2)).is_err());
        assert!(check_granularity(&m, &d, &[frac(1, 2)], &q(1)).is_err());
    }
}
