use thiserror::Error;

use crate::rational::Q;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not tropically regular")]
    NotRegular,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model is disconnected")]
    Disconnected,
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("{point} is not a boundary point of the subgraph")]
    NotBoundary { point: String },
    #[error("granularity {h} does not divide {what}")]
    Granularity { h: Q, what: String },
    #[error("point {0} is not a lattice point at the working granularity")]
    NotLattice(String),
    #[error("bottom (constant -inf) function is not allowed here")]
    BottomFunction,
    #[error("invalid rational function: {0}")]
    InvalidFunction(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("function is not in R(D): D + div(f) is not effective")]
    NotInLinearSystem,
    #[error("the complete linear system |D| is empty")]
    EmptySystem,
    #[error("divisor is not invariant under the group")]
    NotInvariant,
    #[error("no G-invariant divisor in |D| at granularity {h}; try refining the lattice")]
    NoInvariantRepresentative { h: Q },
    #[error("no extremal of R(D) is a lattice function at granularity {h}; try refining the lattice")]
    NoExtremals { h: Q },
    #[error("generating set is not <sigma>-invariant: f_{k} composed with the automorphism is not a member")]
    SetNotInvariant { k: usize },
    #[error("the metric graph is homeomorphic to a circle; its automorphism group is infinite (supply a finite subgroup with rotate/reflect)")]
    InfiniteGroup,
    #[error("model is not a circle")]
    NotCircle,
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("group closure exceeded {0} elements")]
    GroupTooLarge(usize),
    #[error("genus {0} is below the required minimum of 2")]
    GenusTooSmall(i64),
    #[error("the metric graph is hyperelliptic (a degree-2 divisor of rank 1 exists); the canonical map is not injective")]
    Hyperelliptic,
    #[error("rational map is not injective: {0}")]
    NotInjective(String),
    #[error("all coordinates are -inf")]
    AllBottom,
    #[error("coordinate {0} is -inf")]
    InfiniteCoordinate(usize),
    #[error("search space too large ({0} candidates)")]
    SearchTooLarge(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
