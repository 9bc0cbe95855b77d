//! Numerical toolkit for Fourier extension from hyperbolic paraboloids
//! `{(xi, Q(xi))}` with `Q(xi) = xi_1^2 + ... + xi_{d+}^2 - xi_{d+ + 1}^2 - ... - xi_d^2`.

// Range checks are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod euler_lagrange;
pub mod exponents;
pub mod extremizer;
pub mod gaussian_extension;
pub mod grid;
pub mod quadrature;
pub mod saddle;

pub use error::{Error, Result};
