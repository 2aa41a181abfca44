//! Effective upper bounds for Faltings's delta invariant of compact
//! hyperbolic surfaces, with numeric verification of every constant used.

// `!(x < y)` is used on purpose so NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes and reference constants keep all published digits
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod delta_bounds;
pub mod error;
pub mod exact;
pub mod heat_kernel;
pub mod huber;
pub mod invariants;
pub mod numerics;
pub mod scenario;
pub mod selberg;
pub mod supnorm;
pub mod verify;

pub use error::{Error, Result};
