//! Piecewise Z-affine functions on a metric graph.

use std::sync::Arc;

use itertools::Itertools;
use num_traits::Signed;

use crate::automorphism::Automorphism;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::metric_graph::{Dir, Lattice, Model, Point};
use crate::rational::{fmt_q, parse_q, to_i64, zero, Q};
use crate::trop_algebra::TropScalar;

/// Either the bottom function (identically `-inf`) or, for every edge, the
/// breakpoints `(offset, value)` from offset 0 to the edge length. Collinear
/// breakpoints are always pruned, so equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    model: Arc<Model>,
    pieces: Option<Vec<Vec<(Q, Q)>>>,
}

fn slope(a: &(Q, Q), b: &(Q, Q)) -> Q {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

fn prune(points: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(last) = out.last() {
            if last.0 == p.0 {
                continue;
            }
        }
        while out.len() >= 2 && slope(&out[out.len() - 2], &out[out.len() - 1]) == slope(&out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

/// Value at `t` of the piecewise linear function through `pts`.
fn interpolate(pts: &[(Q, Q)], t: &Q) -> Q {
    let i = pts.partition_point(|(s, _)| s <= t);
    if i == 0 {
        return pts[0].1.clone();
    }
    if i == pts.len() {
        return pts[i - 1].1.clone();
    }
    let (a, b) = (&pts[i - 1], &pts[i]);
    if a.0 == *t {
        return a.1.clone();
    }
    &a.1 + slope(a, b) * (t - &a.0)
}

impl RationalFunction {
    pub fn bottom(model: Arc<Model>) -> Self {
        Self { model, pieces: None }
    }

    pub fn constant(model: Arc<Model>, c: Q) -> Self {
        let pieces = model.edges().iter().map(|e| vec![(zero(), c.clone()), (e.length.clone(), c.clone())]).collect();
        Self { model, pieces: Some(pieces) }
    }

    /// Validates breakpoints (full edge coverage, increasing offsets,
    /// integer slopes, continuity at vertices) and prunes collinear ones.
    pub fn new(model: Arc<Model>, pieces: Vec<Vec<(Q, Q)>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidFunction(msg));
        if pieces.len() != model.num_edges() {
            return bad(format!("expected {} edges, got {}", model.num_edges(), pieces.len()));
        }
        let mut at_vertex: Vec<Option<Q>> = vec![None; model.num_vertices()];
        for (e, pts) in pieces.iter().enumerate() {
            let edge = model.edge(e);
            if pts.len() < 2 || pts[0].0 != zero() || pts[pts.len() - 1].0 != edge.length {
                return bad(format!("edge `{}` must have breakpoints at 0 and its length", edge.name));
            }
            for (a, b) in pts.iter().tuple_windows() {
                if a.0 >= b.0 {
                    return bad(format!("offsets on edge `{}` must increase", edge.name));
                }
                if !slope(a, b).is_integer() {
                    return bad(format!("non-integer slope on edge `{}`", edge.name));
                }
            }
            for (end, value) in [(0, &pts[0].1), (1, &pts[pts.len() - 1].1)] {
                let v = edge.ends[end];
                match &at_vertex[v] {
                    Some(prev) if prev != value => {
                        return bad(format!("discontinuous at vertex `{}`", model.vertex_name(v)));
                    }
                    _ => at_vertex[v] = Some(value.clone()),
                }
            }
        }
        let pieces = pieces.into_iter().map(prune).collect();
        Ok(Self { model, pieces: Some(pieces) })
    }

    /// The function taking value `values[i]` at lattice vertex `i`, affine on
    /// every lattice edge.
    pub fn from_lattice_values(model: Arc<Model>, lattice: &Lattice, values: &[Q]) -> Result<Self> {
        let pieces = (0..model.num_edges())
            .map(|e| {
                lattice
                    .edge_vertices(e)
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (lattice.h() * Q::from_integer((k as i64).into()), values[i].clone()))
                    .collect()
            })
            .collect();
        Self::new(model, pieces)
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn is_bottom(&self) -> bool {
        self.pieces.is_none()
    }

    /// Breakpoints on edge `e`; `None` for the bottom function.
    pub fn breakpoints(&self, e: usize) -> Option<&[(Q, Q)]> {
        self.pieces.as_ref().map(|p| p[e].as_slice())
    }

    fn finite(&self) -> Result<&Vec<Vec<(Q, Q)>>> {
        self.pieces.as_ref().ok_or(Error::BottomFunction)
    }

    fn value(pieces: &[Vec<(Q, Q)>], m: &Model, p: &Point) -> Q {
        match p {
            Point::Vertex(v) => {
                let (e, end) = m.incidence(*v)[0];
                let pts = &pieces[e];
                if end == 0 { pts[0].1.clone() } else { pts[pts.len() - 1].1.clone() }
            }
            Point::OnEdge { edge, offset } => interpolate(&pieces[*edge], offset),
        }
    }

    pub fn evaluate(&self, p: &Point) -> Result<TropScalar> {
        self.model.check_point(p)?;
        Ok(match &self.pieces {
            None => TropScalar::NegInf,
            Some(pieces) => TropScalar::Finite(Self::value(pieces, &self.model, p)),
        })
    }

    /// Outgoing slope along a direction.
    pub fn slope_in(&self, d: &Dir) -> Result<Q> {
        let pts = &self.finite()?[d.edge];
        let i = pts.partition_point(|(s, _)| *s <= d.offset);
        Ok(if d.forward {
            let i = i.min(pts.len() - 1).max(1);
            slope(&pts[i - 1], &pts[i])
        } else {
            let j = pts.partition_point(|(s, _)| *s < d.offset).max(1);
            -slope(&pts[j - 1], &pts[j])
        })
    }

    pub fn ord_at(&self, p: &Point) -> Result<i64> {
        self.finite()?;
        self.model.check_point(p)?;
        let mut total = zero();
        for d in self.model.directions(p) {
            total += self.slope_in(&d)?;
        }
        Ok(to_i64(&total).expect("integer slopes"))
    }

    /// Points where the function may fail to be harmonic: all vertices and
    /// interior breakpoints.
    pub fn critical_points(&self) -> Result<Vec<Point>> {
        let pieces = self.finite()?;
        let mut pts: Vec<Point> = (0..self.model.num_vertices()).map(Point::Vertex).collect();
        for (e, bp) in pieces.iter().enumerate() {
            for (t, _) in &bp[1..bp.len() - 1] {
                pts.push(Point::OnEdge { edge: e, offset: t.clone() });
            }
        }
        Ok(pts)
    }

    pub fn div(&self) -> Result<Divisor> {
        let mut d = Divisor::zero();
        for p in self.critical_points()? {
            let c = self.ord_at(&p)?;
            d.add_chips(p, c);
        }
        Ok(d)
    }

    fn same_model(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.model, &other.model) || self.model == other.model {
            Ok(())
        } else {
            Err(Error::ModelMismatch("functions live on different models".into()))
        }
    }

    /// Per edge: merged breakpoints of both functions with both values.
    fn merged(a: &[(Q, Q)], b: &[(Q, Q)]) -> Vec<(Q, Q, Q)> {
        let offsets = a.iter().map(|p| &p.0).merge(b.iter().map(|p| &p.0)).dedup();
        offsets.map(|t| (t.clone(), interpolate(a, t), interpolate(b, t))).collect()
    }

    /// Pointwise maximum.
    pub fn trop_sum(&self, other: &Self) -> Result<Self> {
        self.same_model(other)?;
        let (fa, fb) = match (&self.pieces, &other.pieces) {
            (None, _) => return Ok(other.clone()),
            (_, None) => return Ok(self.clone()),
            (Some(a), Some(b)) => (a, b),
        };
        let pieces = fa
            .iter()
            .zip(fb)
            .map(|(a, b)| {
                let rows = Self::merged(a, b);
                let mut out = Vec::with_capacity(rows.len() * 2);
                for (k, (t, x, y)) in rows.iter().enumerate() {
                    if k > 0 {
                        let (s, x0, y0) = &rows[k - 1];
                        let (d0, d1) = (x0 - y0, x - y);
                        if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                            let c = s + (t - s) * &d0 / (&d0 - &d1);
                            let v = interpolate(a, &c);
                            out.push((c, v));
                        }
                    }
                    out.push((t.clone(), x.max(y).clone()));
                }
                prune(out)
            })
            .collect();
        Ok(Self { model: self.model.clone(), pieces: Some(pieces) })
    }

    /// `a ⊙ f`: adds `a` to every value.
    pub fn scalar_shift(&self, a: &TropScalar) -> Self {
        match (a, &self.pieces) {
            (TropScalar::NegInf, _) | (_, None) => Self::bottom(self.model.clone()),
            (TropScalar::Finite(c), Some(p)) => {
                let pieces = p.iter().map(|pts| pts.iter().map(|(t, v)| (t.clone(), v + c)).collect()).collect();
                Self { model: self.model.clone(), pieces: Some(pieces) }
            }
        }
    }

    pub fn max_value(&self) -> Result<Q> {
        let pieces = self.finite()?;
        Ok(pieces.iter().flatten().map(|(_, v)| v).max().expect("at least one edge").clone())
    }

    pub fn min_value(&self) -> Result<Q> {
        let pieces = self.finite()?;
        Ok(pieces.iter().flatten().map(|(_, v)| v).min().expect("at least one edge").clone())
    }

    /// Shift so that the maximum is 0.
    pub fn normalized(&self) -> Result<Self> {
        Ok(self.scalar_shift(&TropScalar::Finite(-self.max_value()?)))
    }

    /// `min over the graph of (self - other)`, both finite.
    pub fn min_difference(&self, other: &Self) -> Result<Q> {
        self.same_model(other)?;
        let (a, b) = (self.finite()?, other.finite()?);
        let best = a
            .iter()
            .zip(b)
            .flat_map(|(x, y)| Self::merged(x, y).into_iter().map(|(_, u, v)| u - v))
            .min()
            .expect("at least one edge");
        Ok(best)
    }

    /// `g = f ∘ σ`, so `g(p) = f(σ(p))`.
    pub fn compose(&self, sigma: &Automorphism) -> Result<Self> {
        if *sigma.model() != *self.model {
            return Err(Error::ModelMismatch("automorphism acts on a different model".into()));
        }
        let Some(pieces) = &self.pieces else {
            return Ok(self.clone());
        };
        let m = &*self.model;
        let inv = sigma.inverse();
        let mut cuts: Vec<Vec<Q>> = m.edges().iter().map(|e| vec![zero(), e.length.clone()]).collect();
        for (e, pts) in pieces.iter().enumerate() {
            for (t, _) in pts {
                let p = m.point_on_edge(e, t.clone()).expect("breakpoint within edge");
                if let Point::OnEdge { edge, offset } = inv.act(&p) {
                    cuts[edge].push(offset);
                }
            }
        }
        let new_pieces = cuts
            .into_iter()
            .enumerate()
            .map(|(e, mut ts)| {
                ts.sort();
                ts.dedup();
                ts.into_iter()
                    .map(|t| {
                        let p = m.point_on_edge(e, t.clone()).expect("offset within edge");
                        let v = Self::value(pieces, m, &sigma.act(&p));
                        (t, v)
                    })
                    .collect()
            })
            .collect();
        Self::new(self.model.clone(), new_pieces)
    }

    /// Values at every lattice vertex, if all breakpoints are lattice points.
    pub fn lattice_values(&self, lattice: &Lattice) -> Result<Vec<Q>> {
        let pieces = self.finite()?;
        for (e, pts) in pieces.iter().enumerate() {
            for (t, _) in pts {
                if !(t / lattice.h()).is_integer() {
                    return Err(Error::NotLattice(format!(
                        "breakpoint at {} on edge `{}`",
                        fmt_q(t),
                        self.model.edge(e).name
                    )));
                }
            }
        }
        Ok(lattice.points().iter().map(|p| Self::value(pieces, &self.model, p)).collect())
    }

    /// `<edge-id>: (t, v) (t, v) ...` per edge, or `-inf` for the bottom function.
    pub fn to_text(&self) -> String {
        match &self.pieces {
            None => "-inf\n".into(),
            Some(pieces) => pieces
                .iter()
                .enumerate()
                .map(|(e, pts)| {
                    let body = pts.iter().map(|(t, v)| format!("({}, {})", fmt_q(t), fmt_q(v))).join(" ");
                    format!("{}: {}\n", self.model.edge(e).name, body)
                })
                .collect(),
        }
    }

    pub fn parse(model: Arc<Model>, text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        if lines.len() == 1 && lines[0].1 == "-inf" {
            return Ok(Self::bottom(model));
        }
        let mut pieces: Vec<Option<Vec<(Q, Q)>>> = vec![None; model.num_edges()];
        for (line, l) in lines {
            let err = |msg: String| Error::Parse { line, msg };
            let (id, rest) = l.split_once(':').ok_or_else(|| err("expected `<edge-id>: (t, v) ...`".into()))?;
            let e = model.edge_index(id.trim()).ok_or_else(|| err(format!("unknown edge `{}`", id.trim())))?;
            if pieces[e].is_some() {
                return Err(err(format!("edge `{}` listed twice", id.trim())));
            }
            let mut pts = Vec::new();
            for chunk in rest.split(')') {
                let chunk = chunk.trim();
                if chunk.is_empty() {
                    continue;
                }
                let inner = chunk.strip_prefix('(').ok_or_else(|| err(format!("expected `(`, got `{chunk}`")))?;
                let (t, v) = inner.split_once(',').ok_or_else(|| err(format!("expected `(t, v)`, got `{chunk})`")))?;
                let t = parse_q(t).map_err(|_| err(format!("bad offset `{}`", t.trim())))?;
                let v = parse_q(v).map_err(|_| err(format!("bad value `{}`", v.trim())))?;
                pts.push((t, v));
            }
            pieces[e] = Some(pts);
        }
        let pieces = pieces
            .into_iter()
            .enumerate()
            .map(|(e, p)| p.ok_or_else(|| Error::Parse { line: 0, msg: format!("edge `{}` missing", model.edge(e).name) }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, pieces)
    }
}

pub fn evaluate(f: &RationalFunction, p: &Point) -> Result<TropScalar> {
    f.evaluate(p)
}

pub fn ord_at(f: &RationalFunction, p: &Point) -> Result<i64> {
    f.ord_at(p)
}

pub fn div(f: &RationalFunction) -> Result<Divisor> {
    f.div()
}

pub fn trop_sum(f: &RationalFunction, g: &RationalFunction) -> Result<RationalFunction> {
    f.trop_sum(g)
}

pub fn scalar_shift(a: &TropScalar, f: &RationalFunction) -> RationalFunction {
    f.scalar_shift(a)
}

pub fn compose(f: &RationalFunction, sigma: &Automorphism) -> Result<RationalFunction> {
    f.compose(sigma)
}

pub fn max_value(f: &RationalFunction) -> Result<Q> {
    f.max_value()
}
