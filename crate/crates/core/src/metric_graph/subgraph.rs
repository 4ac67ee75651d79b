//! Compact subsets of a metric graph with finitely many components.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rational::{zero, Q};

use super::{Dir, Model, Point};

/// Per-edge closed intervals (possibly degenerate `[t, t]` for isolated interior
/// points) plus the vertices contained in the subgraph.
///
/// Normalized form: intervals on each edge are sorted, pairwise disjoint and
/// non-touching; an interval reaching an edge end implies the corresponding
/// vertex is in `vertices`; degenerate intervals sit strictly inside edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgraph {
    intervals: Vec<Vec<(Q, Q)>>,
    vertices: BTreeSet<usize>,
}

impl Subgraph {
    pub fn empty(m: &Model) -> Self {
        Self { intervals: vec![Vec::new(); m.num_edges()], vertices: BTreeSet::new() }
    }

    pub fn full(m: &Model) -> Self {
        Self {
            intervals: m.edges().iter().map(|e| vec![(zero(), e.length.clone())]).collect(),
            vertices: (0..m.num_vertices()).collect(),
        }
    }

    pub fn new(m: &Model, intervals: Vec<Vec<(Q, Q)>>, vertices: BTreeSet<usize>) -> Result<Self> {
        if intervals.len() != m.num_edges() {
            return Err(Error::ModelMismatch("one interval list per edge expected".into()));
        }
        for (e, ivs) in intervals.iter().enumerate() {
            for (a, b) in ivs {
                if *a < zero() || a > b || *b > m.edge(e).length {
                    return Err(Error::InvalidPoint(format!("bad interval on edge `{}`", m.edge(e).name)));
                }
            }
        }
        if vertices.iter().any(|&v| v >= m.num_vertices()) {
            return Err(Error::InvalidPoint("vertex out of range".into()));
        }
        let mut s = Self { intervals, vertices };
        s.normalize(m);
        Ok(s)
    }

    pub fn point(m: &Model, p: &Point) -> Self {
        let mut s = Self::empty(m);
        match p {
            Point::Vertex(v) => {
                s.vertices.insert(*v);
            }
            Point::OnEdge { edge, offset } => s.intervals[*edge].push((offset.clone(), offset.clone())),
        }
        s
    }

    fn normalize(&mut self, m: &Model) {
        for (e, ivs) in self.intervals.iter_mut().enumerate() {
            let len = &m.edge(e).length;
            ivs.sort();
            let mut merged: Vec<(Q, Q)> = Vec::with_capacity(ivs.len());
            for (a, b) in ivs.drain(..) {
                match merged.last_mut() {
                    Some((_, pb)) if a <= *pb => {
                        if b > *pb {
                            *pb = b;
                        }
                    }
                    _ => merged.push((a, b)),
                }
            }
            let ends = m.edge(e).ends;
            let mut kept = Vec::with_capacity(merged.len());
            for (a, b) in merged {
                if a == zero() {
                    self.vertices.insert(ends[0]);
                }
                if b == *len {
                    self.vertices.insert(ends[1]);
                }
                // Degenerate intervals at an edge end are just the vertex.
                if a == b && (a == zero() || b == *len) {
                    continue;
                }
                kept.push((a, b));
            }
            *ivs = kept;
        }
    }

    pub fn union(&self, other: &Subgraph, m: &Model) -> Subgraph {
        let mut s = self.clone();
        for (e, ivs) in other.intervals.iter().enumerate() {
            s.intervals[e].extend(ivs.iter().cloned());
        }
        s.vertices.extend(other.vertices.iter().copied());
        s.normalize(m);
        s
    }

    pub fn intervals(&self, e: usize) -> &[(Q, Q)] {
        &self.intervals[e]
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.intervals.iter().all(Vec::is_empty)
    }

    pub fn is_full(&self, m: &Model) -> bool {
        m.edges()
            .iter()
            .zip(&self.intervals)
            .all(|(e, ivs)| ivs.len() == 1 && ivs[0].0 == zero() && ivs[0].1 == e.length)
            && self.vertices.len() == m.num_vertices()
    }

    /// Neither empty nor all of the graph.
    pub fn is_proper(&self, m: &Model) -> bool {
        !self.is_empty() && !self.is_full(m)
    }

    pub fn contains(&self, p: &Point) -> bool {
        match p {
            Point::Vertex(v) => self.vertices.contains(v),
            Point::OnEdge { edge, offset } => {
                self.intervals[*edge].iter().any(|(a, b)| a <= offset && offset <= b)
            }
        }
    }

    /// Whether the germ `d` lies in the subgraph.
    pub fn contains_dir(&self, d: &Dir) -> bool {
        self.intervals[d.edge].iter().any(|(a, b)| {
            if d.forward {
                *a <= d.offset && d.offset < *b
            } else {
                *a < d.offset && d.offset <= *b
            }
        })
    }

    /// Number of directions at `p` that leave the subgraph.
    fn outdegree_at(&self, m: &Model, p: &Point) -> usize {
        m.directions(p).iter().filter(|d| !self.contains_dir(d)).count()
    }

    /// Boundary points with their outdegree.
    pub fn boundary(&self, m: &Model) -> Vec<(Point, usize)> {
        let mut candidates: BTreeSet<Point> = self.vertices.iter().map(|&v| Point::Vertex(v)).collect();
        for (e, ivs) in self.intervals.iter().enumerate() {
            for (a, b) in ivs {
                for t in [a, b] {
                    if let Ok(p) = m.point_on_edge(e, t.clone()) {
                        candidates.insert(p);
                    }
                }
            }
        }
        candidates
            .into_iter()
            .filter(|p| self.contains(p))
            .filter_map(|p| {
                let out = self.outdegree_at(m, &p);
                (out > 0).then_some((p, out))
            })
            .collect()
    }

    pub fn components(&self, m: &Model) -> Vec<Subgraph> {
        // Union-find over pieces: one node per vertex, one per interval.
        let nv = m.num_vertices();
        let mut pieces: Vec<(usize, usize)> = Vec::new();
        for (e, ivs) in self.intervals.iter().enumerate() {
            for i in 0..ivs.len() {
                pieces.push((e, i));
            }
        }
        let mut uf = UnionFind::new(nv + pieces.len());
        for (k, &(e, i)) in pieces.iter().enumerate() {
            let (a, b) = &self.intervals[e][i];
            let ends = m.edge(e).ends;
            if *a == zero() {
                uf.union(nv + k, ends[0]);
            }
            if *b == m.edge(e).length {
                uf.union(nv + k, ends[1]);
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut out: Vec<Subgraph> = Vec::new();
        let slot = |root: usize, roots: &mut Vec<usize>, out: &mut Vec<Subgraph>| -> usize {
            match roots.iter().position(|&r| r == root) {
                Some(i) => i,
                None => {
                    roots.push(root);
                    out.push(Subgraph::empty(m));
                    out.len() - 1
                }
            }
        };
        for &v in &self.vertices {
            let i = slot(uf.find(v), &mut roots, &mut out);
            out[i].vertices.insert(v);
        }
        for (k, &(e, i)) in pieces.iter().enumerate() {
            let j = slot(uf.find(nv + k), &mut roots, &mut out);
            out[j].intervals[e].push(self.intervals[e][i].clone());
        }
        for s in &mut out {
            s.normalize(m);
        }
        out
    }
}

pub fn components(m: &Model, s: &Subgraph) -> Vec<Subgraph> {
    s.components(m)
}

/// Number of directions at the boundary point `p` leading out of `s`.
pub fn boundary_outdegree(m: &Model, s: &Subgraph, p: &Point) -> Result<usize> {
    m.check_point(p)?;
    let out = if s.contains(p) { s.outdegree_at(m, p) } else { 0 };
    if out == 0 {
        return Err(Error::NotBoundary { point: m.format_point(p) });
    }
    Ok(out)
}

/// Closures of the connected components of `Γ \ S` together with, for every
/// point of `S`, the component entered by each of its directions.
#[derive(Clone, Debug)]
pub struct ClosureDecomposition {
    pub points: Vec<Point>,
    pub closures: Vec<Subgraph>,
    /// `dir_components[i][j]`: component of the `j`-th direction at `points[i]`.
    pub dir_components: Vec<Vec<usize>>,
}

impl ClosureDecomposition {
    pub fn new(m: &Model, boundary_set: &[Point]) -> Self {
        let mut points: Vec<Point> = boundary_set.to_vec();
        points.sort();
        points.dedup();
        let cut_vertex: BTreeSet<usize> = points
            .iter()
            .filter_map(|p| if let Point::Vertex(v) = p { Some(*v) } else { None })
            .collect();
        // Cut positions per edge, including both ends.
        let mut cuts: Vec<Vec<Q>> = m.edges().iter().map(|e| vec![zero(), e.length.clone()]).collect();
        for p in &points {
            if let Point::OnEdge { edge, offset } = p {
                cuts[*edge].push(offset.clone());
            }
        }
        for c in &mut cuts {
            c.sort();
            c.dedup();
        }
        let nv = m.num_vertices();
        let mut seg_base = Vec::with_capacity(cuts.len());
        let mut nseg = 0;
        for c in &cuts {
            seg_base.push(nseg);
            nseg += c.len() - 1;
        }
        let mut uf = UnionFind::new(nv + nseg);
        for (e, c) in cuts.iter().enumerate() {
            let ends = m.edge(e).ends;
            let first = nv + seg_base[e];
            let last = first + c.len() - 2;
            if !cut_vertex.contains(&ends[0]) {
                uf.union(first, ends[0]);
            }
            if !cut_vertex.contains(&ends[1]) {
                uf.union(last, ends[1]);
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut comp_of_seg = vec![0usize; nseg];
        for (s, slot) in comp_of_seg.iter_mut().enumerate() {
            let r = uf.find(nv + s);
            *slot = match roots.iter().position(|&x| x == r) {
                Some(i) => i,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
        }
        let mut closures = vec![Subgraph::empty(m); roots.len()];
        for (e, c) in cuts.iter().enumerate() {
            for i in 0..c.len() - 1 {
                let comp = comp_of_seg[seg_base[e] + i];
                closures[comp].intervals[e].push((c[i].clone(), c[i + 1].clone()));
            }
        }
        for v in 0..nv {
            if !cut_vertex.contains(&v) {
                // A non-cut vertex shares its class with every incident segment.
                let r = uf.find(v);
                if let Some(i) = roots.iter().position(|&x| x == r) {
                    closures[i].vertices.insert(v);
                }
            }
        }
        for c in &mut closures {
            c.normalize(m);
        }
        let seg_of_dir = |d: &Dir| -> usize {
            let c = &cuts[d.edge];
            let i = c.iter().position(|t| *t == d.offset).expect("direction starts at a cut");
            seg_base[d.edge] + if d.forward { i } else { i - 1 }
        };
        let dir_components = points
            .iter()
            .map(|p| m.directions(p).iter().map(|d| comp_of_seg[seg_of_dir(d)]).collect())
            .collect();
        Self { points, closures, dir_components }
    }

    /// Union of the closures selected by `mask`.
    pub fn union_of(&self, m: &Model, mask: u64) -> Subgraph {
        let mut s = Subgraph::empty(m);
        for (i, c) in self.closures.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = s.union(c, m);
            }
        }
        s
    }
}

pub fn complement_closure_subgraphs(m: &Model, boundary_set: &[Point]) -> Vec<Subgraph> {
    ClosureDecomposition::new(m, boundary_set).closures
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
