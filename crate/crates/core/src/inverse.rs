//! Fixed-point reconstruction of the source amplitude `rho` from the
//! observation `u(x0, .)` and the kernel `v(x0, .)`.
//!
//! Every variant starts from `rho_0 = 0` and `rho_1 = d_t^alpha u / K`, then
//! iterates `rho_{m+1} = rho_1 + rho_m - (1/K) int_0^t rho_m'(s) v(t - s) ds`
//! until the `L^2(0, T)` update drops below the threshold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fraccalc::{
    caputo_derivative, convolve, convolve_derivative, mollify, FractionalOrder, MollifierSpec,
    TimeSeries,
};
use crate::{Error, Result};

/// How the convolution term of the iteration is realised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// `int rho_m'(s) v(t - s) ds`, with `rho_m'` the cellwise slope of the
    /// iterate integrated exactly against the interpolated kernel.
    Plain,
    /// The integrated-by-parts form `int rho_m(t - s) v'(s) ds`. Requires
    /// `v(x0, 0) = 0`, i.e. an observation point outside the support of `g`.
    Shifted,
    /// For noisy data: the data is mollified once, and each step reads
    /// `rho_{m+1} = M rho_1 + M rho_m - (1/K) int (M rho_m)'(s) v(t - s) ds`.
    Mollified(MollifierSpec),
}

/// Parameters of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    /// Upper bound `K` of the kernel; also the relaxation constant.
    pub k: f64,
    /// Stop once `||rho_{m+1} - rho_m||_{L^2} <= stop_eps`.
    pub stop_eps: f64,
    pub max_iters: usize,
    pub variant: Variant,
}

impl IterationConfig {
    pub const DEFAULT_MAX_ITERS: usize = 5000;

    pub fn new(k: f64, stop_eps: f64) -> Result<Self> {
        let cfg = Self {
            k,
            stop_eps,
            max_iters: Self::DEFAULT_MAX_ITERS,
            variant: Variant::Plain,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::Domain(format!("K must be positive, got {}", self.k)));
        }
        if !(self.stop_eps.is_finite() && self.stop_eps > 0.0) {
            return Err(Error::Domain(format!(
                "stopping threshold must be positive, got {}",
                self.stop_eps
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything the iteration produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionTrace {
    /// `rho_0 = 0, rho_1, ..., rho_M`.
    pub iterates: Vec<TimeSeries>,
    /// `update_norms[m] = ||rho_{m+1} - rho_m||_{L^2(0,T)}`.
    pub update_norms: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
}

impl ReconstructionTrace {
    pub fn last(&self) -> &TimeSeries {
        self.iterates.last().expect("trace always holds rho_0")
    }

    /// Smallest pointwise increment `rho_{m+1}(t_l) - rho_m(t_l)` over the
    /// first `steps` updates, with the `(m, l)` where it occurs.
    pub fn min_increment(&self, steps: usize) -> (f64, usize, usize) {
        let mut worst = (f64::INFINITY, 0, 0);
        for (m, pair) in self.iterates.windows(2).take(steps).enumerate() {
            for (l, (a, b)) in pair[0].values().iter().zip(pair[1].values()).enumerate() {
                if b - a < worst.0 {
                    worst = (b - a, m, l);
                }
            }
        }
        worst
    }
}

/// Tolerance on `u(x0, 0) = 0` for [`caputo_of_data`].
pub const DATA_ORIGIN_TOL: f64 = 1e-10;

/// `d_t^alpha u` of the observation. The iteration is derived for `u(., 0) = 0`.
pub fn caputo_of_data(data: &TimeSeries, alpha: FractionalOrder) -> Result<TimeSeries> {
    if data.first().abs() > DATA_ORIGIN_TOL {
        return Err(Error::Domain(format!(
            "observation must vanish at t = 0, got {}",
            data.first()
        )));
    }
    caputo_derivative(data, alpha)
}

/// Runs the iteration selected by `cfg`.
pub fn reconstruct(
    data: &TimeSeries,
    kernel: &TimeSeries,
    alpha: FractionalOrder,
    cfg: &IterationConfig,
) -> Result<ReconstructionTrace> {
    cfg.validate()?;
    let grid = *data.grid();
    grid.ensure_same(kernel.grid(), "data vs kernel")?;
    check_kernel(kernel, cfg.k)?;
    if cfg.variant == Variant::Shifted && kernel.first().abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "shifted iteration needs v(x0, 0) = 0, got {}",
            kernel.first()
        )));
    }

    let inv_k = 1.0 / cfg.k;
    let seed = match cfg.variant {
        Variant::Mollified(spec) => {
            let smooth = mollify(data, spec)?;
            // noise reaches t = 0 as well; re-anchor so that u(0) = 0 holds again
            let anchored = smooth.map(|v| v - smooth.first())?;
            caputo_of_data(&anchored, alpha)?
        }
        _ => caputo_of_data(data, alpha)?,
    }
    .scale(inv_k)?;
    let smooth_seed = match cfg.variant {
        Variant::Mollified(spec) => Some(mollify(&seed, spec)?),
        _ => None,
    };

    let mut iterates = vec![TimeSeries::zeros(grid)];
    let mut update_norms = Vec::new();
    let mut converged = false;
    for m in 0..cfg.max_iters {
        let current = &iterates[m];
        let next = if m == 0 {
            seed.clone()
        } else {
            step(
                current,
                kernel,
                &seed,
                smooth_seed.as_ref(),
                inv_k,
                cfg.variant,
            )
            .map_err(|e| divergence(e, m + 1))?
        };
        let norm = next.sub(current)?.l2_norm();
        if !norm.is_finite() {
            return Err(Error::Divergence { iteration: m + 1 });
        }
        update_norms.push(norm);
        iterates.push(next);
        if norm <= cfg.stop_eps {
            converged = true;
            break;
        }
    }
    Ok(ReconstructionTrace {
        iterations_used: update_norms.len(),
        iterates,
        update_norms,
        converged,
    })
}

fn step(
    rho: &TimeSeries,
    kernel: &TimeSeries,
    seed: &TimeSeries,
    smooth_seed: Option<&TimeSeries>,
    inv_k: f64,
    variant: Variant,
) -> Result<TimeSeries> {
    match variant {
        Variant::Plain => {
            let conv = convolve_derivative(rho, kernel)?;
            combine(seed, rho, &conv, inv_k)
        }
        Variant::Shifted => {
            let conv = convolve_derivative(kernel, rho)?;
            combine(seed, rho, &conv, inv_k)
        }
        Variant::Mollified(spec) => {
            let smooth = mollify(rho, spec)?;
            let conv = convolve_derivative(&smooth, kernel)?;
            let base = smooth_seed.expect("mollified runs carry a smoothed seed");
            combine(base, &smooth, &conv, inv_k)
        }
    }
}

fn combine(
    base: &TimeSeries,
    rho: &TimeSeries,
    conv: &TimeSeries,
    inv_k: f64,
) -> Result<TimeSeries> {
    let values = base
        .values()
        .iter()
        .zip(rho.values())
        .zip(conv.values())
        .map(|((b, r), c)| b + r - inv_k * c)
        .collect();
    TimeSeries::new(*base.grid(), values)
}

fn divergence(err: Error, iteration: usize) -> Error {
    match err {
        Error::NonFinite { .. } => Error::Divergence { iteration },
        other => other,
    }
}

const KERNEL_TOL: f64 = 1e-12;

fn check_kernel(kernel: &TimeSeries, k: f64) -> Result<()> {
    let max = kernel.max();
    if max > k {
        return Err(Error::Precondition(format!(
            "kernel maximum {max} exceeds K = {k}"
        )));
    }
    let min = kernel.min();
    if min < -KERNEL_TOL {
        return Err(Error::Precondition(format!(
            "kernel must be nonnegative, found {min}"
        )));
    }
    Ok(())
}

/// `Phi_1 = 1 - v/K`, `Phi_m = Phi_{m-1} * Phi_1` for `m = 1..=m_max`.
///
/// The error after `m` steps is `rho - rho_m = rho^{(m)} * Phi_m` for data with
/// enough vanishing derivatives at 0, and `0 <= Phi_m(t) <= t^{m-1}/(m-1)!`.
pub fn residual_phi_sequence(kernel: &TimeSeries, k: f64, m_max: usize) -> Result<Vec<TimeSeries>> {
    if m_max == 0 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("K must be positive, got {k}")));
    }
    check_kernel(kernel, k)?;
    let phi1 = kernel.map(|v| 1.0 - v / k)?;
    let mut out = vec![phi1.clone()];
    for _ in 1..m_max {
        let next = convolve(out.last().expect("non-empty"), &phi1)?;
        out.push(next);
    }
    Ok(out)
}

/// `w(t_l) = u(t_l) + sigma * max|u| * r_l` with `r_l` i.i.d. uniform on
/// `(-1, 1)` from a ChaCha8 stream seeded by `seed`. Node 0 is perturbed too.
pub fn add_noise(data: &TimeSeries, sigma: f64, seed: u64) -> Result<TimeSeries> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Domain(format!(
            "noise level must be nonnegative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(data.clone());
    }
    let amplitude = sigma * data.max_abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = data
        .values()
        .iter()
        .map(|u| u + amplitude * rng.random_range(-1.0..1.0))
        .collect();
    TimeSeries::new(*data.grid(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::TimeGrid;
    use statrs::function::gamma::gamma;

    fn grid() -> TimeGrid {
        TimeGrid::new(1.0, 64).unwrap()
    }

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let data = TimeSeries::zeros(grid());
        let kernel = TimeSeries::from_fn(grid(), |t| 0.1 * t).unwrap();
        let cfg = IterationConfig::new(0.2, 1e-5).unwrap();
        let trace = reconstruct(&data, &kernel, order(0.9), &cfg).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations_used, 1);
        assert!(trace.iterates.iter().all(|r| r.max_abs() == 0.0));
    }

    #[test]
    fn constant_kernel_converges_immediately() {
        // v = K gives d^a u = K rho, so rho_1 is already the answer
        let k = 0.2;
        let a = order(0.7);
        let kernel = TimeSeries::constant(grid(), k);
        // rho = t^2 and v = K give u = K t^3 / 3
        let data = TimeSeries::from_fn(grid(), |t| k * t.powi(3) / 3.0).unwrap();
        let cfg = IterationConfig::new(k, 1e-12).unwrap();
        let trace = reconstruct(&data, &kernel, a, &cfg).unwrap();
        assert!(trace.converged);
        assert!(trace.iterations_used <= 2);
        assert!(trace.iterates[1].max_abs_diff(&trace.iterates[2]).unwrap() < 1e-14);
    }

    #[test]
    fn kernel_bound_enforced() {
        let data = TimeSeries::zeros(grid());
        let kernel = TimeSeries::constant(grid(), 0.3);
        let cfg = IterationConfig::new(0.2, 1e-5).unwrap();
        assert!(matches!(
            reconstruct(&data, &kernel, order(0.5), &cfg),
            Err(Error::Precondition(_))
        ));
        let shifted = cfg.with_variant(Variant::Shifted);
        let kernel = TimeSeries::constant(grid(), 0.1);
        assert!(matches!(
            reconstruct(&data, &kernel, order(0.5), &shifted),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn bad_config_rejected() {
        assert!(IterationConfig::new(0.0, 1e-5).is_err());
        assert!(IterationConfig::new(0.2, -1.0).is_err());
        let cfg = IterationConfig::new(0.2, 1e-5).unwrap().with_max_iters(0);
        let z = TimeSeries::zeros(grid());
        assert!(reconstruct(&z, &z, order(0.5), &cfg).is_err());
    }

    #[test]
    fn max_iters_caps_the_run() {
        let kernel = TimeSeries::from_fn(grid(), |t| 0.1 * t).unwrap();
        let data = TimeSeries::from_fn(grid(), |t| t * t).unwrap();
        let cfg = IterationConfig::new(0.2, 1e-14).unwrap().with_max_iters(3);
        let trace = reconstruct(&data, &kernel, order(0.5), &cfg).unwrap();
        assert_eq!(trace.iterations_used, 3);
        assert_eq!(trace.iterates.len(), 4);
        assert!(!trace.converged);
    }

    #[test]
    fn caputo_of_data_checks_origin() {
        let a = order(0.5);
        let t = TimeSeries::from_fn(grid(), |t| t).unwrap();
        let d = caputo_of_data(&t, a).unwrap();
        for (l, s) in grid().nodes().enumerate().skip(1) {
            assert!((d[l] - s.sqrt() / gamma(1.5)).abs() < 1e-12);
        }
        let shifted = t.map(|v| v + 1e-6).unwrap();
        assert!(matches!(caputo_of_data(&shifted, a), Err(Error::Domain(_))));
    }

    #[test]
    fn phi_sequence_limits() {
        let g = grid();
        let ones = residual_phi_sequence(&TimeSeries::zeros(g), 0.2, 4).unwrap();
        for (l, t) in g.nodes().enumerate() {
            assert!((ones[0][l] - 1.0).abs() < 1e-15);
            assert!((ones[1][l] - t).abs() < 1e-14);
            assert!((ones[2][l] - t * t / 2.0).abs() < 1e-14);
        }
        let zero = residual_phi_sequence(&TimeSeries::constant(g, 0.2), 0.2, 3).unwrap();
        assert!(zero.iter().all(|p| p.max_abs() == 0.0));
        assert!(residual_phi_sequence(&TimeSeries::zeros(g), 0.2, 0).is_err());
    }

    #[test]
    fn noise_contract() {
        let data = TimeSeries::from_fn(grid(), |t| t.sin()).unwrap();
        assert_eq!(add_noise(&data, 0.0, 7).unwrap(), data);
        let a = add_noise(&data, 0.01, 7).unwrap();
        let b = add_noise(&data, 0.01, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_noise(&data, 0.01, 8).unwrap());
        assert!(a.max_abs_diff(&data).unwrap() <= 0.01 * data.max_abs());
        assert!(matches!(add_noise(&data, -0.1, 1), Err(Error::Domain(_))));
    }
}
