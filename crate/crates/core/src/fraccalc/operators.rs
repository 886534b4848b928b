use statrs::function::gamma::gamma;

use super::{FractionalOrder, TimeSeries};
use crate::{Error, Result};

/// Riemann-Liouville integral `J^beta f` for `0 <= beta <= 1`.
///
/// Product-trapezoid rule: `f` is replaced by its piecewise-linear
/// interpolant and the weakly singular kernel `(t - s)^(beta - 1) / Gamma(beta)`
/// is integrated exactly against it. `beta = 0` returns `f` unchanged and
/// `beta = 1` reduces to the composite trapezoid rule.
pub fn rl_integral(f: &TimeSeries, beta: f64) -> Result<TimeSeries> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!(
            "Riemann-Liouville integral order must lie in [0, 1], got {beta}"
        )));
    }
    if beta == 0.0 {
        return Ok(f.clone());
    }
    let grid = *f.grid();
    let fv = f.values();
    let steps = grid.steps();
    let scale = grid.step().powf(beta) / gamma(beta + 2.0);
    let p = beta + 1.0;

    // interior[k] is the weight of f_{n-k}, 1 <= k <= n-1; it only depends on n-j.
    let pow: Vec<f64> = (0..=steps + 1).map(|k| (k as f64).powf(p)).collect();
    let interior: Vec<f64> = (0..=steps)
        .map(|k| {
            if k == 0 {
                0.0
            } else {
                pow[k + 1] - 2.0 * pow[k] + pow[k - 1]
            }
        })
        .collect();

    let mut out = vec![0.0; grid.len()];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let nf = n as f64;
        let first = pow[n - 1] - (nf - 1.0 - beta) * nf.powf(beta);
        let mut acc = first * fv[0] + fv[n];
        for j in 1..n {
            acc += interior[n - j] * fv[j];
        }
        *slot = scale * acc;
    }
    TimeSeries::new(grid, out)
}

/// Caputo derivative `d_t^alpha f`.
///
/// For `alpha < 1` this is the L1 scheme
/// `tau^(-alpha) / Gamma(2 - alpha) * sum_{j<l} b_j (f_{l-j} - f_{l-j-1})`
/// with `b_j = (j + 1)^(1 - alpha) - j^(1 - alpha)`; the value stored at `t_0`
/// is 0. For `alpha = 1` it is the classical derivative by second-order
/// differences ([`differentiate`]), one-sided at both ends.
pub fn caputo_derivative(f: &TimeSeries, alpha: FractionalOrder) -> Result<TimeSeries> {
    let grid = *f.grid();
    if grid.steps() < 2 {
        return Err(Error::Domain(
            "Caputo derivative needs a grid with at least two steps".into(),
        ));
    }
    if alpha.is_classical() {
        return differentiate(f);
    }
    let a = alpha.value();
    let weights = l1_weights(a, grid.steps());
    let scale = grid.step().powf(-a) / gamma(2.0 - a);
    let fv = f.values();
    let diffs: Vec<f64> = fv.windows(2).map(|w| w[1] - w[0]).collect();

    let mut out = vec![0.0; grid.len()];
    for (l, slot) in out.iter_mut().enumerate().skip(1) {
        let acc: f64 = (0..l).map(|j| weights[j] * diffs[l - j - 1]).sum();
        *slot = scale * acc;
    }
    TimeSeries::new(grid, out)
}

/// L1 weights `b_j = (j + 1)^(1 - alpha) - j^(1 - alpha)` for `j = 0..=steps`.
pub(crate) fn l1_weights(alpha: f64, steps: usize) -> Vec<f64> {
    let e = 1.0 - alpha;
    (0..=steps)
        .map(|j| ((j + 1) as f64).powf(e) - (j as f64).powf(e))
        .collect()
}

/// First derivative by second-order differences: centred in the interior,
/// three-point one-sided at `t_0` and `t_L`.
pub fn differentiate(f: &TimeSeries) -> Result<TimeSeries> {
    let grid = *f.grid();
    let n = grid.steps();
    if n < 2 {
        return Err(Error::Domain(
            "second-order differences need at least two steps".into(),
        ));
    }
    let h2 = 2.0 * grid.step();
    let v = f.values();
    let mut out = vec![0.0; grid.len()];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2;
    for i in 1..n {
        out[i] = (v[i + 1] - v[i - 1]) / h2;
    }
    out[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / h2;
    TimeSeries::new(grid, out)
}

/// Riemann-Liouville derivative `D_t^beta f = f(0) t^(-beta) / Gamma(1 - beta) + d_t^beta f`
/// for `0 <= beta < 1`.
///
/// The singular term is not representable at `t = 0`; node 0 carries only the
/// Caputo part (which is 0). `beta = 0` returns `f`.
pub fn rl_derivative(f: &TimeSeries, beta: f64) -> Result<TimeSeries> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain(format!(
            "Riemann-Liouville derivative order must lie in [0, 1), got {beta} \
             (use caputo_derivative for the classical case)"
        )));
    }
    if beta == 0.0 {
        return Ok(f.clone());
    }
    let caputo = caputo_derivative(f, FractionalOrder::new(beta)?)?;
    let grid = *f.grid();
    let coeff = f.first() / gamma(1.0 - beta);
    let mut values = caputo.into_values();
    for (l, v) in values.iter_mut().enumerate().skip(1) {
        *v += coeff * grid.node(l).powf(-beta);
    }
    TimeSeries::new(grid, values)
}
