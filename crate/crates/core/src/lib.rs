//! Numerics for a discrete-step sum over histories.
//!
//! A particle crosses `m` lattice steps in a fixed time and may flip
//! direction any number of times. This crate counts the paths in each flip
//! class, sums their Euclidean weights into a kernel, assigns path
//! probabilities, and evaluates the two-level spin ensembles that mirror
//! the same counting.
//!
//! Physical constants are always supplied by the caller.

pub mod combinatorics;
pub mod count;
pub mod ensemble;
mod error;
pub mod kernel;
pub mod params;
pub mod series;
pub mod stats;

pub use count::BigCount;
pub use error::{Error, Result};
pub use params::{debroglie_limit, dimensionless_b, DeBroglieCheck, PathClass1D, PathClassND, PhysicalParams};
pub use series::{SumResult, Truncation};
