//! Rational maps given by generating sets and the matrix realizations of
//! automorphism groups they induce.
//!
//! For generators `f_1, ..., f_{n+1}` permuted by a group `G` via
//! `f_k ∘ σ = f_{π_σ(k)}`, every `σ` acts on the image of
//! `φ = (f_1 : ... : f_{n+1})` by a tropical permutation matrix `P_σ` and, in
//! the coordinates `j(X)_k = X_k - X_{n+1}`, by an integer matrix `A_σ`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::automorphism::{compute_aut, Automorphism, FiniteGroup};
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::linear_system::{check_granularity, default_granularity, is_hyperelliptic, GenerationCheck, LinearSystemContext};
use crate::metric_graph::{Model, Point};
use crate::rational::{frac, q, zero, Q};
use crate::rational_fn::RationalFunction;
use crate::trop_algebra::{TropMatrix, TropScalar, ProjPoint};

/// Target of a rational map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapMode {
    /// `TP^n`, compared up to a common shift.
    Projective,
    /// `T^{n+1}`, coordinates compared exactly.
    Affine,
    /// `R^{n+1}`, for maps without `-inf` values.
    Euclidean,
}

/// `x ↦ (f_1(x), ..., f_{n+1}(x))`.
#[derive(Clone, Debug)]
pub struct RationalMap {
    model: Arc<Model>,
    functions: Vec<RationalFunction>,
    mode: MapMode,
}

/// Value of a rational map at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum MapValue {
    Projective(ProjPoint),
    Affine(Vec<TropScalar>),
    Euclidean(Vec<Q>),
}

impl RationalMap {
    pub fn new(functions: Vec<RationalFunction>, mode: MapMode) -> Result<Self> {
        let first = functions.first().ok_or_else(|| Error::InvalidFunction("a map needs at least one function".into()))?;
        let model = first.model().clone();
        for f in &functions {
            if f.is_bottom() {
                return Err(Error::BottomFunction);
            }
            if **f.model() != *model {
                return Err(Error::ModelMismatch("functions live on different models".into()));
            }
        }
        if mode == MapMode::Projective && functions.len() < 2 {
            return Err(Error::DimensionMismatch("projective maps need at least 2 functions".into()));
        }
        Ok(Self { model, functions, mode })
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn functions(&self) -> &[RationalFunction] {
        &self.functions
    }

    pub fn mode(&self) -> MapMode {
        self.mode
    }

    /// Raw coordinate values at `p`.
    pub fn values(&self, p: &Point) -> Result<Vec<Q>> {
        self.functions
            .iter()
            .map(|f| Ok(f.evaluate(p)?.finite().expect("not bottom").clone()))
            .collect()
    }

    pub fn evaluate(&self, p: &Point) -> Result<MapValue> {
        let v = self.values(p)?;
        Ok(match self.mode {
            MapMode::Projective => MapValue::Projective(ProjPoint::new(v.into_iter().map(TropScalar::Finite).collect())?),
            MapMode::Affine => MapValue::Affine(v.into_iter().map(TropScalar::Finite).collect()),
            MapMode::Euclidean => MapValue::Euclidean(v),
        })
    }

    /// Coordinates in which injectivity is decided: `j` of the projective
    /// point, or the raw values otherwise.
    pub fn coordinates(&self, p: &Point) -> Result<Vec<Q>> {
        let v = self.values(p)?;
        Ok(match self.mode {
            MapMode::Projective => {
                let last = v.last().expect("non-empty").clone();
                v[..v.len() - 1].iter().map(|x| x - &last).collect()
            }
            _ => v,
        })
    }
}

pub fn evaluate_map(phi: &RationalMap, p: &Point) -> Result<MapValue> {
    phi.evaluate(p)
}

/// `j(X_1 : ... : X_{n+1}) = (X_1 - X_{n+1}, ..., X_n - X_{n+1})`.
pub fn dehomogenize(p: &ProjPoint) -> Result<Vec<Q>> {
    let coords = p.coords();
    let vals = coords
        .iter()
        .enumerate()
        .map(|(k, c)| c.finite().cloned().ok_or(Error::InfiniteCoordinate(k)))
        .collect::<Result<Vec<Q>>>()?;
    let last = vals.last().expect("at least two coordinates").clone();
    Ok(vals[..vals.len() - 1].iter().map(|x| x - &last).collect())
}

/// The section `i(v) = (v_1 : ... : v_n : 0)` of [`dehomogenize`].
pub fn homogenize(v: &[Q]) -> Result<ProjPoint> {
    let mut coords: Vec<TropScalar> = v.iter().cloned().map(TropScalar::Finite).collect();
    coords.push(TropScalar::zero());
    ProjPoint::new(coords)
}

/// Outcome of the injectivity test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Injectivity {
    pub injective: bool,
    /// Two distinct points with the same image.
    pub witness: Option<(Point, Point)>,
}

struct Segment {
    edge: usize,
    a: Q,
    b: Q,
    start: Vec<Q>,
    delta: Vec<Q>,
}

impl Segment {
    fn point(&self, m: &Model, s: &Q) -> Point {
        m.point_on_edge(self.edge, &self.a + (&self.b - &self.a) * s).expect("within edge")
    }
}

/// Solves `x·u = y·v + w` for scalars `(x, y)` given vectors; `None` when
/// inconsistent or when `u` and `v` are parallel.
fn solve_independent(u: &[Q], v: &[Q], w: &[Q]) -> Option<(Q, Q)> {
    let n = u.len();
    for i in 0..n {
        for k in i + 1..n {
            let det = &u[i] * -&v[k] + &v[i] * &u[k];
            if !det.is_zero() {
                // x u_i - y v_i = w_i ; x u_k - y v_k = w_k
                let x = (&w[i] * -&v[k] + &v[i] * &w[k]) / &det;
                let y = (&u[i] * &w[k] - &w[i] * &u[k]) / &det;
                let ok = (0..n).all(|r| &x * &u[r] - &y * &v[r] == w[r]);
                return ok.then_some((x, y));
            }
        }
    }
    None
}

/// `Some(λ)` with `v = λ u`, for non-zero `u`.
fn parallel_factor(u: &[Q], v: &[Q]) -> Option<Q> {
    let i = u.iter().position(|x| !x.is_zero())?;
    let lambda = &v[i] / &u[i];
    u.iter().zip(v).all(|(a, b)| a * &lambda == *b).then_some(lambda)
}

fn unit(x: &Q) -> bool {
    !x.is_negative() && *x <= Q::one()
}

/// Exact injectivity test over the common refinement of all breakpoints: the
/// map is affine on every segment, so a collision is a solution of a small
/// linear system between two segments.
pub fn is_injective(phi: &RationalMap) -> Result<Injectivity> {
    let m = &*phi.model;
    let mut segments = Vec::new();
    for (e, edge) in m.edges().iter().enumerate() {
        let mut cuts: Vec<Q> = vec![zero(), edge.length.clone()];
        for f in &phi.functions {
            cuts.extend(f.breakpoints(e).expect("not bottom").iter().map(|(t, _)| t.clone()));
        }
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let pa = m.point_on_edge(e, w[0].clone())?;
            let pb = m.point_on_edge(e, w[1].clone())?;
            let start = phi.coordinates(&pa)?;
            let end = phi.coordinates(&pb)?;
            let delta: Vec<Q> = end.iter().zip(&start).map(|(x, y)| x - y).collect();
            segments.push(Segment { edge: e, a: w[0].clone(), b: w[1].clone(), start, delta });
        }
    }
    let collision = |p: Point, p2: Point| Injectivity { injective: false, witness: Some((p, p2)) };
    for s in &segments {
        if s.delta.iter().all(Q::is_zero) {
            return Ok(collision(s.point(m, &zero()), s.point(m, &frac(1, 2))));
        }
    }
    for (i, s1) in segments.iter().enumerate() {
        for s2 in &segments[i + 1..] {
            // s1.start + x Δ1 = s2.start + y Δ2
            let w: Vec<Q> = s2.start.iter().zip(&s1.start).map(|(a, b)| a - b).collect();
            let candidates: Vec<(Q, Q)> = match parallel_factor(&s1.delta, &s2.delta) {
                None => solve_independent(&s1.delta, &s2.delta, &w).into_iter().collect(),
                Some(lambda) => match parallel_factor(&s1.delta, &w) {
                    // On a common line s2 covers parameters [beta, beta + lambda] of s1.
                    Some(beta) => {
                        let end = &beta + &lambda;
                        let (lo, hi) = if beta <= end { (beta.clone(), end) } else { (end, beta.clone()) };
                        let lo = lo.max(zero());
                        let hi = hi.min(Q::one());
                        if lo > hi {
                            vec![]
                        } else {
                            [lo.clone(), (&lo + &hi) / q(2), hi]
                                .into_iter()
                                .map(|x| {
                                    let y = (&x - &beta) / &lambda;
                                    (x, y)
                                })
                                .collect()
                        }
                    }
                    None => vec![],
                },
            };
            for (x, y) in candidates {
                if unit(&x) && unit(&y) {
                    let (p1, p2) = (s1.point(m, &x), s2.point(m, &y));
                    if p1 != p2 {
                        return Ok(collision(p1, p2));
                    }
                }
            }
        }
    }
    Ok(Injectivity { injective: true, witness: None })
}

/// `π` with `f_k ∘ σ = f_{π(k)}`.
pub fn index_permutation(functions: &[RationalFunction], sigma: &Automorphism) -> Result<Vec<usize>> {
    functions
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let g = f.compose(sigma)?;
            functions.iter().position(|h| *h == g).ok_or(Error::SetNotInvariant { k })
        })
        .collect()
}

/// Integer matrix of `σ` in the coordinates `j`: row `k` has `+1` at `π(k)`
/// and `-1` at `π(n+1)`, each only when that index is not the last one.
pub fn build_a_sigma(pi: &[usize]) -> Vec<Vec<i64>> {
    let n = pi.len() - 1;
    let mut a = vec![vec![0i64; n]; n];
    for (k, row) in a.iter_mut().enumerate() {
        if pi[k] < n {
            row[pi[k]] += 1;
        }
        if pi[n] < n {
            row[pi[n]] -= 1;
        }
    }
    a
}

/// `P` with `P[k][π(k)] = 0`, so `(P ⊙ v)_k = v_{π(k)}`.
pub fn build_perm_matrix(pi: &[usize]) -> TropMatrix {
    TropMatrix::permutation(pi)
}

pub fn int_mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn int_mat_vec(a: &[Vec<i64>], v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(zero(), |acc, (c, x)| acc + x * q(*c)))
        .collect()
}

/// Exact determinant by elimination over the rationals.
pub fn determinant(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return 0;
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        let (top, rest) = m.split_at_mut(c + 1);
        let pivot_row = &top[c];
        for row in rest.iter_mut() {
            let factor = &row[c] / &pivot;
            if !factor.is_zero() {
                for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &factor * y;
                }
            }
        }
    }
    det.to_integer().try_into().expect("determinant fits in i64")
}

/// Matrices attached to one group element.
#[derive(Clone, Debug)]
pub struct ElementRealization {
    /// Index of the element in the group.
    pub element: usize,
    pub permutation: Vec<usize>,
    pub a: Vec<Vec<i64>>,
    pub det: i64,
    pub p: TropMatrix,
    pub pgl: TropMatrix,
}

/// First point where a commutation identity fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationFailure {
    pub element: usize,
    pub point: Point,
    pub which: &'static str,
}

#[derive(Clone, Debug)]
pub struct Realization {
    pub group: FiniteGroup,
    /// The `G`-invariant member of `|D|` whose extremals are used.
    pub divisor: Divisor,
    pub h: Q,
    /// Generators in coordinate order; the last one is the dehomogenizing coordinate.
    pub functions: Vec<RationalFunction>,
    pub divisors: Vec<Divisor>,
    pub elements: Vec<ElementRealization>,
    pub injectivity: Injectivity,
    /// `A_{σ∘τ} = A_σ A_τ` for all pairs.
    pub a_homomorphism: bool,
    /// `P_{σ∘τ} = P_σ ⊙ P_τ` for all pairs.
    pub p_homomorphism: bool,
    /// Pairs of distinct elements with the same `P`.
    pub collisions: Vec<(usize, usize)>,
    pub commutation_failures: Vec<CommutationFailure>,
    pub generation: GenerationCheck,
}

impl Realization {
    pub fn n(&self) -> usize {
        self.functions.len() - 1
    }

    /// `σ ↦ P_σ` is injective.
    pub fn psi_injective(&self) -> bool {
        self.collisions.is_empty()
    }

    pub fn map(&self, mode: MapMode) -> Result<RationalMap> {
        RationalMap::new(self.functions.clone(), mode)
    }

    /// Homomorphism and commutation checks all passed.
    pub fn verified(&self) -> bool {
        self.a_homomorphism && self.p_homomorphism && self.commutation_failures.is_empty()
    }

    /// Errors when `φ` is not injective, with the witness pair.
    pub fn require_injective(self) -> Result<Self> {
        if self.injectivity.injective {
            return Ok(self);
        }
        let m = self.group.model();
        let (a, b) = self.injectivity.witness.clone().expect("non-injective maps carry a witness");
        Err(Error::NotInjective(format!("{} and {} have the same image", m.format_point(&a), m.format_point(&b))))
    }
}

/// Reorders generators so the one with the largest stabilizer comes last
/// (first such in the given order); the others keep their order.
fn order_generators(functions: &[RationalFunction], g: &FiniteGroup) -> Result<Vec<usize>> {
    let mut best = 0;
    let mut best_size = 0;
    for (k, f) in functions.iter().enumerate() {
        let mut size = 0;
        for sigma in g.elements() {
            if f.compose(sigma)? == *f {
                size += 1;
            }
        }
        if size > best_size {
            best = k;
            best_size = size;
        }
    }
    let mut order: Vec<usize> = (0..functions.len()).filter(|&k| k != best).collect();
    order.push(best);
    Ok(order)
}

/// Realizes `G` through the extremals of `R(D')` for a `G`-invariant
/// `D' ∈ |D|`. The lattice of `ctx` must be preserved by `G`.
pub fn realize(ctx: &LinearSystemContext, g: &FiniteGroup) -> Result<Realization> {
    if *g.model() != **ctx.model() {
        return Err(Error::ModelMismatch("group acts on a different model".into()));
    }
    check_granularity(ctx.model(), ctx.divisor(), &g.lattice_constraints(), ctx.h())?;
    let divisor = ctx
        .invariant_representative(g)?
        .ok_or_else(|| Error::NoInvariantRepresentative { h: ctx.h().clone() })?;
    let inv_ctx = ctx.with_divisor(divisor.clone())?;
    let set = inv_ctx.invariant_generating_set(g)?;
    if set.functions.is_empty() {
        return Err(Error::NoExtremals { h: ctx.h().clone() });
    }
    let order = order_generators(&set.functions, g)?;
    let functions: Vec<RationalFunction> = order.iter().map(|&k| set.functions[k].clone()).collect();
    let divisors: Vec<Divisor> = order.iter().map(|&k| set.divisors[k].clone()).collect();

    let mut elements = Vec::with_capacity(g.order());
    for (i, sigma) in g.elements().iter().enumerate() {
        let permutation = index_permutation(&functions, sigma)?;
        let a = build_a_sigma(&permutation);
        let p = build_perm_matrix(&permutation);
        let pgl = p.pgl_representative()?;
        elements.push(ElementRealization { element: i, det: determinant(&a), permutation, a, p, pgl });
    }
    let table = g.table();
    let mut a_homomorphism = true;
    let mut p_homomorphism = true;
    for (i, ei) in elements.iter().enumerate() {
        for (j, ej) in elements.iter().enumerate() {
            let ij = &elements[table[i][j]];
            if ij.a != int_mat_mul(&ei.a, &ej.a) {
                a_homomorphism = false;
            }
            if ij.p != ei.p.mul(&ej.p)? {
                p_homomorphism = false;
            }
        }
    }
    let mut collisions = Vec::new();
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            if elements[i].p == elements[j].p {
                collisions.push((i, j));
            }
        }
    }
    let phi = RationalMap::new(functions.clone(), MapMode::Projective)?;
    let injectivity = is_injective(&phi)?;
    let mut commutation_failures = Vec::new();
    for (i, sigma) in g.elements().iter().enumerate() {
        if let Some(fail) = verify_commutation(&phi, ctx.lattice().points(), sigma, &elements[i])? {
            commutation_failures.push(CommutationFailure { element: i, ..fail });
        }
    }
    Ok(Realization {
        group: g.clone(),
        divisor,
        h: ctx.h().clone(),
        functions,
        divisors,
        elements,
        injectivity,
        a_homomorphism,
        p_homomorphism,
        collisions,
        commutation_failures,
        generation: set.check,
    })
}

/// Checks `j(φ(σx)) = A_σ j(φ(x))`, `φ(σx) = P_σ ⊙ φ(x)` projectively, and
/// the same identity on raw coordinates, at every given point.
pub fn verify_commutation(
    phi: &RationalMap,
    points: &[Point],
    sigma: &Automorphism,
    real: &ElementRealization,
) -> Result<Option<CommutationFailure>> {
    let fail = |p: &Point, which| Some(CommutationFailure { element: real.element, point: p.clone(), which });
    for x in points {
        let vx = phi.values(x)?;
        let vs = phi.values(&sigma.act(x))?;
        let tx: Vec<TropScalar> = vx.into_iter().map(TropScalar::Finite).collect();
        let ts: Vec<TropScalar> = vs.into_iter().map(TropScalar::Finite).collect();
        let px = ProjPoint::new(tx.clone())?;
        let ps = ProjPoint::new(ts.clone())?;
        if dehomogenize(&ps)? != int_mat_vec(&real.a, &dehomogenize(&px)?) {
            return Ok(fail(x, "euclidean"));
        }
        let image = real.p.apply(&tx)?;
        if ProjPoint::new(image.clone())? != ps {
            return Ok(fail(x, "projective"));
        }
        if image != ts {
            return Ok(fail(x, "affine"));
        }
    }
    Ok(None)
}

/// Realization of the full automorphism group through the canonical linear
/// system, for non-hyperelliptic graphs of genus at least 2.
pub fn realize_canonical(m: &Arc<Model>, refine: u32) -> Result<Realization> {
    let genus = m.genus();
    if genus < 2 {
        return Err(Error::GenusTooSmall(genus));
    }
    let g = compute_aut(m)?;
    let k = m.canonical_divisor();
    let extra = g.lattice_constraints();
    let h = default_granularity(m, &k, &extra, refine);
    if is_hyperelliptic(m, &h)? {
        return Err(Error::Hyperelliptic);
    }
    let ctx = LinearSystemContext::new(m.clone(), k, &h)?;
    realize(&ctx, &g)?.require_injective()
}
