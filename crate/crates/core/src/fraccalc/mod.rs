//! Discrete fractional calculus on uniform time grids.
//!
//! All operators act on [`TimeSeries`] sampled at the nodes `t_l = l T / L` and
//! return series on the same grid. Quadratures treat the samples as the nodal
//! values of a piecewise-linear function, so every rule here is exact for
//! piecewise-linear input unless stated otherwise.

mod convolution;
mod grid;
mod mittag_leffler;
mod mollify;
mod operators;

pub use convolution::{convolve, convolve_derivative};
pub use grid::{FractionalOrder, TimeGrid, TimeSeries};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_decay_constant, rgamma};
pub use mollify::{mollifier_kernel, mollify, MollifierSpec};
pub use operators::{caputo_derivative, differentiate, rl_derivative, rl_integral};
