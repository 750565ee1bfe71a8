//! Spanning-tree counting and upper-bound machinery for planar graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: rotation systems, the `.rot` format, face tracing.
//! * [`families`]: generators for the graph families used in experiments.
//! * [`kirchhoff`]: exact counts via the matrix-tree theorem plus two
//!   independent oracles.
//! * [`cycle_model`]: the random outdegree-one graph model and exhaustive
//!   checks of the two dependency lemmas it relies on.
//! * [`signatures`]: 2-extension signatures and the primal constraints.
//! * [`bound`]: probability products and the charging bound on `log t(G)`.
//! * [`dual`]: dual constraints, certificate verification and a small exact
//!   LP solver used to re-derive certificates.
//! * [`asymptotics`]: entropy based forest bounds and derived constants.

pub mod asymptotics;
pub mod bound;
pub mod cycle_model;
pub mod dual;
pub mod families;
pub mod graph;
pub mod kirchhoff;
pub mod signatures;
mod util;

pub use graph::{Adjacency, FaceList, GraphError, RotationGraph, SimpleGraph};
pub use num_bigint::BigUint;
pub use num_rational::BigRational;
pub use util::rational_to_f64;

/// Exact spanning-tree count.
pub type BigCount = BigUint;

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
