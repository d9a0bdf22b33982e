//! Numerical toolkit for quasilinear subdiffusion problems
//!
//! ```text
//! ∂_t^α(u − u0) − div(a(u)∇u) = f   in (0,T) × Ω
//!                           u = g   on (0,T) × ∂Ω
//!                      u(0) = u0
//! ```
//!
//! with α ∈ (0,1). The crate provides the L1 discretization of the fractional
//! derivative (with optional sum-of-exponentials history compression), a
//! Mittag-Leffler evaluator, the scalar fractional relaxation equation used as
//! a decay envelope, finite-difference quasilinear operators on boxes, a
//! Picard/Newton time stepper and a set of diagnostics (norms, Hölder
//! seminorms, decay certificates and weak-form residuals).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod banded;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fode;
pub mod frackernel;
pub mod mlf;
pub mod solver;
pub mod spatial;

pub use error::{Error, Result};
