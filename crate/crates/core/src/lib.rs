//! Exact and approximate probabilistic bisimulation of finite labelled
//! probabilistic transition systems, using classification matrices and
//! their Moore-Penrose pseudo-inverses, plus simulation checking for finite
//! Kripke structures via Galois connections.

pub mod bisim;
pub mod epsilon;
pub mod galois;
pub mod gen;
pub mod io;
pub mod linalg;
pub mod pts;

pub use linalg::{Matrix, NormKind};
pub use pts::{disjoint_union, Classification, LabelledPts, Partition, PtsError, DEFAULT_TOL};
