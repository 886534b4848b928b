//! Measurable forms of the analytical statements behind the method: the
//! reverse convolution inequality, the stability constant `B_delta` and the
//! residual of the fractional Duhamel identity.

use crate::forward::{probe, SpaceTimeField};
use crate::fraccalc::{convolve, rl_integral, FractionalOrder, TimeGrid, TimeSeries};
use crate::{Error, Result};

/// Which form of the reverse convolution inequality is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RciVariant {
    /// `f1` keeps one sign on all of `(eta, T0 + delta)`.
    A,
    /// `f1` keeps one sign on `(eta, T0)` only; the right-hand side gains
    /// `2 ||f1||_{L^1(T0, T0+delta)} ||f2||_{L^1(0, delta)}`.
    B,
}

/// Data for one check of
/// `||f1||_{L^1(eta,T0)} ||f2||_{L^1(0,delta)} <= || int_eta^t f1(s) f2(t-s) ds ||_{L^1(eta,T0+delta)} (+ correction)`.
///
/// Both factors live on one grid over `[0, T0 + delta - eta]`: `f1` is stored
/// shifted, `f1_shifted(s) = f1(eta + s)`, and `f2` as is. `T0 - eta` and
/// `delta` must be grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RciInstance {
    pub f1_shifted: TimeSeries,
    pub f2: TimeSeries,
    pub eta: f64,
    pub t0: f64,
    pub delta: f64,
    pub variant: RciVariant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RciReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`
    pub slack: f64,
    pub variant: RciVariant,
}

impl RciInstance {
    /// Samples `f1` on `[eta, T0 + delta]` and `f2` on `[0, T0 + delta - eta]`
    /// with `steps` cells.
    pub fn sample(
        f1: impl Fn(f64) -> f64,
        f2: impl Fn(f64) -> f64,
        eta: f64,
        t0: f64,
        delta: f64,
        steps: usize,
        variant: RciVariant,
    ) -> Result<Self> {
        let grid = TimeGrid::new(t0 + delta - eta, steps)?;
        Ok(Self {
            f1_shifted: TimeSeries::from_fn(grid, |s| f1(eta + s))?,
            f2: TimeSeries::from_fn(grid, f2)?,
            eta,
            t0,
            delta,
            variant,
        })
    }
}

const SIGN_TOL: f64 = 1e-14;

/// Evaluates both sides of the inequality by trapezoid quadrature.
pub fn check_rci(instance: &RciInstance) -> Result<RciReport> {
    let RciInstance {
        f1_shifted: f1,
        f2,
        eta,
        t0,
        delta,
        variant,
    } = instance;
    let grid = *f1.grid();
    grid.ensure_same(f2.grid(), "rci factors")?;
    if !(0.0 <= *eta && eta < t0 && *delta > 0.0) {
        return Err(Error::Domain(format!(
            "need 0 <= eta < T0 and delta > 0, got eta={eta}, T0={t0}, delta={delta}"
        )));
    }
    if ((t0 + delta - eta) - grid.horizon()).abs() > 1e-12 * grid.horizon().max(1.0) {
        return Err(Error::GridMismatch(format!(
            "grid horizon {} differs from T0 + delta - eta = {}",
            grid.horizon(),
            t0 + delta - eta
        )));
    }
    let split = node(grid, t0 - eta, "T0 - eta")?;
    let d = node(grid, *delta, "delta")?;
    if f2.min() < -SIGN_TOL {
        return Err(Error::Domain("f2 must be nonnegative".into()));
    }
    let signed_upto = match variant {
        RciVariant::A => grid.steps(),
        RciVariant::B => split,
    };
    if !one_signed(&f1.values()[..=signed_upto]) {
        return Err(Error::Domain(format!(
            "f1 changes sign where variant {variant:?} requires one sign"
        )));
    }

    let f2_mass = partial_l1(f2.values(), grid.step(), 0, d);
    let lhs = partial_l1(f1.values(), grid.step(), 0, split) * f2_mass;
    let conv = convolve(f1, f2)?;
    let mut rhs = conv.l1_norm();
    if *variant == RciVariant::B {
        rhs += 2.0 * partial_l1(f1.values(), grid.step(), split, grid.steps()) * f2_mass;
    }
    Ok(RciReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        variant: *variant,
    })
}

fn node(grid: TimeGrid, t: f64, what: &str) -> Result<usize> {
    grid.node_index(t)
        .ok_or_else(|| Error::GridMismatch(format!("{what} = {t} is not a grid node")))
}

fn one_signed(values: &[f64]) -> bool {
    values.iter().all(|&v| v >= -SIGN_TOL) || values.iter().all(|&v| v <= SIGN_TOL)
}

/// Trapezoid rule for `int |f|` between nodes `a` and `b`.
fn partial_l1(values: &[f64], step: f64, a: usize, b: usize) -> f64 {
    (a..b)
        .map(|i| 0.5 * step * (values[i].abs() + values[i + 1].abs()))
        .sum()
}

/// `int_0^delta v(t) dt` for the piecewise-linear interpolant of the kernel;
/// `delta` need not be a node.
pub fn kernel_mass(kernel: &TimeSeries, delta: f64) -> Result<f64> {
    let grid = kernel.grid();
    if !(delta > 0.0 && delta <= grid.horizon() * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!(
            "delta must lie in (0, T], got {delta}"
        )));
    }
    let tau = grid.step();
    let v = kernel.values();
    let pos = (delta / tau).min(grid.steps() as f64);
    let full = pos.floor() as usize;
    if v[..=full.min(grid.steps())].iter().any(|&x| x < -1e-12) {
        return Err(Error::Precondition("kernel must be nonnegative".into()));
    }
    let mut mass: f64 = (0..full).map(|i| 0.5 * tau * (v[i] + v[i + 1])).sum();
    let frac = pos - full as f64;
    if frac > 0.0 && full < grid.steps() {
        let end = v[full] + frac * (v[full + 1] - v[full]);
        mass += 0.5 * frac * tau * (v[full] + end);
    }
    Ok(mass)
}

/// `B_delta = 1 / ||v(x0, .)||_{L^1(0, delta)}`.
pub fn compute_b_delta(kernel: &TimeSeries, delta: f64) -> Result<f64> {
    let mass = kernel_mass(kernel, delta)?;
    if mass <= 0.0 {
        return Err(Error::Positivity(format!(
            "kernel has no mass on (0, {delta})"
        )));
    }
    Ok(1.0 / mass)
}

/// Relative sup-norm residual of `J^{1-alpha} u(x0, .) = (rho * v(x0, .))`.
///
/// Falls back to the absolute residual when `rho * v` vanishes (below 1e-14).
pub fn duhamel_residual(
    rho: &TimeSeries,
    field: &SpaceTimeField,
    kernel: &TimeSeries,
    alpha: FractionalOrder,
    x0: f64,
) -> Result<f64> {
    let grid = *rho.grid();
    grid.ensure_same(field.time(), "rho vs field")?;
    grid.ensure_same(kernel.grid(), "rho vs kernel")?;
    let u = probe(field, x0)?;
    let lhs = rl_integral(&u, 1.0 - alpha.value())?;
    let rhs = convolve(rho, kernel)?;
    let diff = lhs.max_abs_diff(&rhs)?;
    let scale = rhs.max_abs();
    Ok(if scale < 1e-14 { diff } else { diff / scale })
}
