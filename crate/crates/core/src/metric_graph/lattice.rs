//! Uniform subdivision of a model into segments of length `h`.

use std::collections::HashMap;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, steps, Q};

use super::{Edge, Model, Point};

/// A model subdivided into edges of length exactly `h`, with the
/// correspondence between lattice vertices and points of the base model.
#[derive(Clone, Debug)]
pub struct Lattice {
    h: Q,
    model: Model,
    points: Vec<Point>,
    index: HashMap<Point, usize>,
    /// Per base edge: lattice vertices at offsets `0, h, 2h, ..., length`.
    edge_vertices: Vec<Vec<usize>>,
    /// Neighbour lists with multiplicity; loops of the lattice graph are omitted.
    adjacency: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn h(&self) -> &Q {
        &self.h
    }

    /// The subdivided model itself.
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Base-model point of lattice vertex `i`.
    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn edge_vertices(&self, e: usize) -> &[usize] {
        &self.edge_vertices[e]
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    /// Dense chip vector indexed by lattice vertex.
    pub fn to_dense(&self, d: &Divisor, base: &Model) -> Result<Vec<i64>> {
        let mut v = vec![0i64; self.len()];
        for (p, c) in d.iter() {
            let i = self.index_of(p).ok_or_else(|| Error::NotLattice(base.format_point(p)))?;
            v[i] += c;
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &[i64]) -> Divisor {
        let mut d = Divisor::zero();
        for (i, &c) in v.iter().enumerate() {
            d.add_chips(self.points[i].clone(), c);
        }
        d
    }

    /// `Δ z`: chips gained by every vertex when vertex `i` fires `z[i]` times.
    pub fn fire(&self, z: &[i64]) -> Vec<i64> {
        (0..self.len())
            .map(|i| self.adjacency[i].iter().map(|&j| z[j] - z[i]).sum())
            .collect()
    }
}

/// Splits every edge into segments of length `h`; `h` must divide every edge length.
pub fn subdivide(m: &Model, h: &Q) -> Result<Lattice> {
    if *h <= crate::rational::zero() {
        return Err(Error::Granularity { h: h.clone(), what: "anything (must be positive)".into() });
    }
    let mut names: Vec<String> = m.vertex_names().to_vec();
    let mut points: Vec<Point> = (0..m.num_vertices()).map(Point::Vertex).collect();
    let mut edge_vertices = Vec::with_capacity(m.num_edges());
    let mut edges = Vec::new();
    for (e, edge) in m.edges().iter().enumerate() {
        let n = steps(h, &edge.length).ok_or_else(|| Error::Granularity {
            h: h.clone(),
            what: format!("the length {} of edge `{}`", fmt_q(&edge.length), edge.name),
        })?;
        let n = n as usize;
        let mut chain = vec![edge.ends[0]];
        for k in 1..n {
            names.push(format!("{}#{}", edge.name, k));
            points.push(Point::OnEdge { edge: e, offset: h * Q::from_integer((k as i64).into()) });
            chain.push(points.len() - 1);
        }
        chain.push(edge.ends[1]);
        for k in 0..n {
            edges.push(Edge { name: format!("{}.{}", edge.name, k), ends: [chain[k], chain[k + 1]], length: h.clone() });
        }
        edge_vertices.push(chain);
    }
    let mut adjacency = vec![Vec::new(); points.len()];
    for e in &edges {
        if !e.is_loop() {
            adjacency[e.ends[0]].push(e.ends[1]);
            adjacency[e.ends[1]].push(e.ends[0]);
        }
    }
    let index = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let model = Model::new(names, edges)?;
    Ok(Lattice { h: h.clone(), model, points, index, edge_vertices, adjacency })
}
