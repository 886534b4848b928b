use super::TimeSeries;
use crate::Result;

/// Running convolution `(f * g)(t_n) = int_0^{t_n} f(s) g(t_n - s) ds`.
///
/// Both factors are taken as piecewise-linear interpolants of their samples and
/// the product is integrated exactly on every cell, so the result is exact for
/// piecewise-linear input. The value at `t_0` is 0.
pub fn convolve(f: &TimeSeries, g: &TimeSeries) -> Result<TimeSeries> {
    let grid = *f.grid();
    grid.ensure_same(g.grid(), "convolve")?;
    let (fv, gv) = (f.values(), g.values());
    let scale = grid.step() / 6.0;
    let mut out = vec![0.0; grid.len()];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let mut acc = 0.0;
        for j in 0..n {
            let (f0, f1) = (fv[j], fv[j + 1]);
            let (g0, g1) = (gv[n - j], gv[n - j - 1]);
            acc += 2.0 * f0 * g0 + f0 * g1 + f1 * g0 + 2.0 * f1 * g1;
        }
        *slot = scale * acc;
    }
    TimeSeries::new(grid, out)
}

/// `int_0^{t_n} f'(s) g(t_n - s) ds` with `f'` the cellwise slope of the
/// interpolant of `f`.
///
/// Exact for piecewise-linear `f` and `g`: on cell `k` the slope is constant
/// and the mean of `g` over the mirrored cell is the average of its end values.
pub fn convolve_derivative(f: &TimeSeries, g: &TimeSeries) -> Result<TimeSeries> {
    let grid = *f.grid();
    grid.ensure_same(g.grid(), "convolve_derivative")?;
    let (fv, gv) = (f.values(), g.values());
    let diffs: Vec<f64> = fv.windows(2).map(|w| w[1] - w[0]).collect();
    let means: Vec<f64> = gv.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let mut out = vec![0.0; grid.len()];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        // cell k (from t_k to t_{k+1}) meets g on cell n-1-k
        *slot = (0..n).map(|k| diffs[k] * means[n - 1 - k]).sum();
    }
    TimeSeries::new(grid, out)
}
