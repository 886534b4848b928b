//! Reconstruction of the temporal source factor `rho(t)` in the time-fractional
//! diffusion equation `(d_t^alpha - Laplacian) u = rho(t) g(x)` on `(0, 1)` from
//! observations of `u` at a single interior point.
//!
//! The crate is organised bottom-up:
//!
//! - [`fraccalc`]: discrete Riemann-Liouville and Caputo operators, the
//!   Mittag-Leffler function, convolutions and mollification on uniform grids.
//! - [`forward`]: L1 finite-difference solvers for the direct problems and an
//!   independent eigenfunction-expansion solver used as an oracle.
//! - [`inverse`]: the fixed-point reconstruction (plain, shifted and mollified
//!   updates), synthetic noise and the residual kernels of the convergence proof.
//! - [`diagnostics`]: measurable forms of the analytic estimates (reverse
//!   convolution inequality, `B_delta`, Duhamel residual).

pub mod diagnostics;
mod error;
pub mod forward;
pub mod fraccalc;
pub mod inverse;

pub use error::{Error, Result};
