//! Divisor theory on metric graphs and tropical realizations of their
//! automorphism groups.

pub mod automorphism;
pub mod cli;
pub mod divisor;
pub mod error;
pub mod linear_system;
pub mod metric_graph;
pub mod rational;
pub mod rational_fn;
pub mod realization;
pub mod trop_algebra;

pub use error::{Error, Result};
