//! Metric graphs: a finite connected multigraph (loops allowed) with exact
//! positive rational edge lengths.
//!
//! Every edge stores an ordered endpoint pair; offset 0 is the first endpoint
//! and offset `length` the second. A [`Point`] is either a vertex or a strictly
//! interior offset on an edge, so each point of the metric space has exactly
//! one encoding.

mod lattice;
mod subgraph;

pub use lattice::{subdivide, Lattice};
pub use subgraph::{boundary_outdegree, complement_closure_subgraphs, components, ClosureDecomposition, Subgraph};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Signed;

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, zero, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub ends: [usize; 2],
    pub length: Q,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }
}

/// A point of the metric graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    /// Strictly interior: `0 < offset < length`.
    OnEdge { edge: usize, offset: Q },
}

/// A germ of direction leaving a point along an edge: starts at `offset` and
/// moves towards increasing offsets when `forward`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dir {
    pub edge: usize,
    pub offset: Q,
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    /// Per vertex: incident `(edge, end)` pairs; a loop appears twice.
    incidence: Vec<Vec<(usize, usize)>>,
}

impl Model {
    pub fn new(vertex_names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, v) in vertex_names.iter().enumerate() {
            if seen.insert(v.as_str(), i).is_some() {
                return Err(Error::InvalidModel(format!("duplicate vertex id `{v}`")));
            }
        }
        let mut edge_names = HashMap::new();
        let mut incidence = vec![Vec::new(); vertex_names.len()];
        for (i, e) in edges.iter().enumerate() {
            if edge_names.insert(e.name.as_str(), i).is_some() {
                return Err(Error::InvalidModel(format!("duplicate edge id `{}`", e.name)));
            }
            if !e.length.is_positive() {
                return Err(Error::InvalidModel(format!("edge `{}` has non-positive length", e.name)));
            }
            for (end, &v) in e.ends.iter().enumerate() {
                if v >= vertex_names.len() {
                    return Err(Error::InvalidModel(format!("edge `{}` references a missing vertex", e.name)));
                }
                incidence[v].push((i, end));
            }
        }
        if edges.is_empty() {
            return Err(Error::InvalidModel("a metric graph needs at least one edge".into()));
        }
        let model = Self { vertex_names, edges, incidence };
        if !model.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(model)
    }

    /// Builds a model from vertex ids and `(edge id, tail, head, length)` tuples.
    pub fn from_spec(vertices: &[&str], edges: &[(&str, &str, &str, Q)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let lookup = |id: &str| {
            names
                .iter()
                .position(|n| n == id)
                .ok_or_else(|| Error::InvalidModel(format!("unknown vertex `{id}`")))
        };
        let mut es = Vec::with_capacity(edges.len());
        for (name, a, b, len) in edges {
            es.push(Edge { name: name.to_string(), ends: [lookup(a)?, lookup(b)?], length: len.clone() });
        }
        Self::new(names, es)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_names.len();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(e, end) in &self.incidence[v] {
                let w = self.edges[e].ends[1 - end];
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.name == name)
    }

    pub fn incidence(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    pub fn total_length(&self) -> Q {
        self.edges.iter().fold(zero(), |acc, e| acc + &e.length)
    }

    /// First Betti number `#E - #V + 1`.
    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.vertex_names.len() as i64 + 1
    }

    /// True when every vertex has valence 2, i.e. the space is a circle.
    pub fn is_circle(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.incidence[v].len() == 2)
    }

    /// Point at `offset` along edge `e`, with endpoints normalized to vertices.
    pub fn point_on_edge(&self, e: usize, offset: Q) -> Result<Point> {
        let edge = self
            .edges
            .get(e)
            .ok_or_else(|| Error::InvalidPoint(format!("edge index {e} out of range")))?;
        if offset.is_negative() || offset > edge.length {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside edge `{}` of length {}",
                fmt_q(&offset),
                edge.name,
                fmt_q(&edge.length)
            )));
        }
        if offset == zero() {
            Ok(Point::Vertex(edge.ends[0]))
        } else if offset == edge.length {
            Ok(Point::Vertex(edge.ends[1]))
        } else {
            Ok(Point::OnEdge { edge: e, offset })
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        match p {
            Point::Vertex(v) if *v < self.num_vertices() => Ok(()),
            Point::Vertex(v) => Err(Error::InvalidPoint(format!("vertex index {v} out of range"))),
            Point::OnEdge { edge, offset } => {
                let e = self
                    .edges
                    .get(*edge)
                    .ok_or_else(|| Error::InvalidPoint(format!("edge index {edge} out of range")))?;
                if offset.is_positive() && *offset < e.length {
                    Ok(())
                } else {
                    Err(Error::InvalidPoint(format!(
                        "offset {} is not interior to edge `{}`",
                        fmt_q(offset),
                        e.name
                    )))
                }
            }
        }
    }

    /// All directions leaving `p`; their number is the valence.
    pub fn directions(&self, p: &Point) -> Vec<Dir> {
        match p {
            Point::Vertex(v) => self.incidence[*v]
                .iter()
                .map(|&(e, end)| Dir {
                    edge: e,
                    offset: if end == 0 { zero() } else { self.edges[e].length.clone() },
                    forward: end == 0,
                })
                .collect(),
            Point::OnEdge { edge, offset } => vec![
                Dir { edge: *edge, offset: offset.clone(), forward: false },
                Dir { edge: *edge, offset: offset.clone(), forward: true },
            ],
        }
    }

    pub fn valency(&self, p: &Point) -> Result<usize> {
        self.check_point(p)?;
        Ok(self.directions(p).len())
    }

    /// `K = Σ (val(x) - 2) x`; only vertices of valence other than 2 contribute.
    pub fn canonical_divisor(&self) -> Divisor {
        let mut d = Divisor::zero();
        for v in 0..self.num_vertices() {
            d.add_chips(Point::Vertex(v), self.incidence[v].len() as i64 - 2);
        }
        d
    }

    /// `v:<id>` or `e:<id>@<p>/<q>`.
    pub fn format_point(&self, p: &Point) -> String {
        match p {
            Point::Vertex(v) => format!("v:{}", self.vertex_names[*v]),
            Point::OnEdge { edge, offset } => format!("e:{}@{}", self.edges[*edge].name, fmt_q(offset)),
        }
    }

    pub fn parse_point(&self, s: &str) -> Result<Point> {
        let bad = |msg: String| Error::InvalidPoint(msg);
        if let Some(id) = s.strip_prefix("v:") {
            let v = self.vertex_index(id).ok_or_else(|| bad(format!("unknown vertex `{id}`")))?;
            Ok(Point::Vertex(v))
        } else if let Some(rest) = s.strip_prefix("e:") {
            let (id, off) = rest
                .rsplit_once('@')
                .ok_or_else(|| bad(format!("expected e:<id>@<offset>, got `{s}`")))?;
            let e = self.edge_index(id).ok_or_else(|| bad(format!("unknown edge `{id}`")))?;
            let off = parse_q(off).map_err(|_| bad(format!("bad offset in `{s}`")))?;
            self.point_on_edge(e, off)
        } else {
            Err(bad(format!("expected v:<id> or e:<id>@<offset>, got `{s}`")))
        }
    }

    /// Text form: `vertex <id>` and `edge <id> <v1> <v2> <length>` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertex_names {
            out.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {} {}\n",
                e.name,
                self.vertex_names[e.ends[0]],
                self.vertex_names[e.ends[1]],
                fmt_q(&e.length)
            ));
        }
        out
    }

    /// Valences keyed by vertex id.
    pub fn valences(&self) -> BTreeMap<String, usize> {
        (0..self.num_vertices())
            .map(|v| (self.vertex_names[v].clone(), self.incidence[v].len()))
            .collect()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn genus(m: &Model) -> i64 {
    m.genus()
}

pub fn valency(m: &Model, p: &Point) -> Result<usize> {
    m.valency(p)
}

pub fn canonical_divisor(m: &Model) -> Divisor {
    m.canonical_divisor()
}
