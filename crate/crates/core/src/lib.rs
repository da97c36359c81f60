//! Eigenvalue enclosures for Schrödinger operators `-∂² - V` on the halfline
//! with complex potentials, together with the tools used to certify them:
//! exact point-interaction models, a discretized Birman–Schwinger operator
//! and an inward shooting eigensolver.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod birman_schwinger;
pub mod delta;
pub mod error;
pub mod gfun;
pub mod ode;
pub mod optimize;
pub mod potential;
pub mod quadrature;
pub mod region;
pub mod shooting;
pub mod special;
pub mod winding;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use region::BoundaryCondition;
