//! Numerical laboratory for the regularity of Monge–Ampère Dirichlet problems on convex polytopes.

// `!(x > 0.0)` is how inputs reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod constructions;
pub mod error;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod normalize;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
