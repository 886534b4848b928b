use super::{TimeGrid, TimeSeries};
use crate::{Error, Result};

/// Radius of the smoothing kernel used by [`mollify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierSpec {
    radius: f64,
}

impl MollifierSpec {
    pub fn new(radius: f64) -> Result<Self> {
        if radius.is_finite() && radius > 0.0 {
            Ok(Self { radius })
        } else {
            Err(Error::Domain(format!(
                "mollifier radius must be positive, got {radius}"
            )))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Quartic bump `15/(16 eps) (1 + t/eps)^2 (1 - t/eps)^2` on `|t| <= eps`, 0 outside.
pub fn mollifier_kernel(t: f64, radius: f64) -> f64 {
    let r = t / radius;
    if r.abs() > 1.0 {
        0.0
    } else {
        let s = 1.0 - r * r;
        15.0 / (16.0 * radius) * s * s
    }
}

/// Mollification `f^eps(t) = int zeta_eps(t - s) f~(s) ds`.
///
/// `f~` extends `f` past the ends by point reflection,
/// `2 f(0) - f(-t)` on the left and `2 f(T) - f(2T - t)` on the right,
/// so affine functions are reproduced exactly, endpoints included.
/// The integral is taken exactly against the piecewise-linear interpolant
/// of the extended samples.
pub fn mollify(f: &TimeSeries, spec: MollifierSpec) -> Result<TimeSeries> {
    let grid = *f.grid();
    let eps = spec.radius();
    if eps >= grid.horizon() {
        return Err(Error::Domain(format!(
            "mollifier radius {eps} must be smaller than the horizon {}",
            grid.horizon()
        )));
    }
    let weights = stencil(grid, eps);
    let reach = (weights.len() - 1) / 2;
    let steps = grid.steps();
    let fv = f.values();
    // extended sample at offset i from node 0, i in -reach..=steps+reach
    let ext = |i: isize| -> f64 {
        if i < 0 {
            2.0 * fv[0] - fv[reflect(-i, steps)]
        } else if i as usize > steps {
            2.0 * fv[steps] - fv[reflect(2 * steps as isize - i, steps)]
        } else {
            fv[i as usize]
        }
    };
    let out = (0..grid.len())
        .map(|n| {
            weights
                .iter()
                .enumerate()
                .map(|(i, w)| w * ext(n as isize + i as isize - reach as isize))
                .sum()
        })
        .collect();
    TimeSeries::new(grid, out)
}

// eps < T keeps the reflected index inside the grid.
fn reflect(i: isize, steps: usize) -> usize {
    i.clamp(0, steps as isize) as usize
}

/// Weights `W_k = int zeta(s) hat(s / tau - k) ds` for `|k| <= ceil(eps / tau)`.
fn stencil(grid: TimeGrid, eps: f64) -> Vec<f64> {
    const NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let tau = grid.step();
    let reach = (eps / tau).ceil() as isize;
    (-reach..=reach)
        .map(|k| {
            let mut total = 0.0;
            // the hat centred at k tau lives on two cells
            for cell in [k - 1, k] {
                let a = (cell as f64 * tau).max(-eps);
                let b = ((cell + 1) as f64 * tau).min(eps);
                if b <= a {
                    continue;
                }
                let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
                // degree-5 integrand, exact for three-point Gauss-Legendre
                for (x, w) in NODES.iter().zip(WEIGHTS) {
                    let s = mid + half * x;
                    let hat = 1.0 - (s / tau - k as f64).abs();
                    total += w * half * mollifier_kernel(s, eps) * hat;
                }
            }
            total
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::new(1.0, 128).unwrap()
    }

    #[test]
    fn kernel_normalised() {
        for eps in [5.0 / 128.0, 0.1] {
            let n = 20_000;
            let h = 2.0 * eps / n as f64;
            let total: f64 = (0..n)
                .map(|i| mollifier_kernel(-eps + (i as f64 + 0.5) * h, eps) * h)
                .sum();
            assert!((total - 1.0).abs() < 1e-8, "eps={eps}");
            assert_eq!(mollifier_kernel(1.01 * eps, eps), 0.0);
        }
    }

    #[test]
    fn stencil_sums_to_one() {
        for eps in [5.0 / 128.0, 0.1, 0.0041] {
            let w = stencil(grid(), eps);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(w.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn constants_and_affine_reproduced() {
        let spec = MollifierSpec::new(5.0 / 128.0).unwrap();
        let c = TimeSeries::constant(grid(), 2.5);
        assert!(mollify(&c, spec).unwrap().max_abs_diff(&c).unwrap() < 1e-14);
        let f = TimeSeries::from_fn(grid(), |t| 3.0 * t - 1.0).unwrap();
        assert!(mollify(&f, spec).unwrap().max_abs_diff(&f).unwrap() < 1e-14);
    }

    #[test]
    fn radius_checks() {
        assert!(MollifierSpec::new(0.0).is_err());
        let f = TimeSeries::zeros(grid());
        let spec = MollifierSpec::new(1.0).unwrap();
        assert!(matches!(mollify(&f, spec), Err(Error::Domain(_))));
    }

    #[test]
    fn smooths_a_spike() {
        let mut v = vec![0.0; 129];
        v[64] = 1.0;
        let f = TimeSeries::new(grid(), v).unwrap();
        let m = mollify(&f, MollifierSpec::new(0.05).unwrap()).unwrap();
        assert!(m[64] < 0.3 && m[64] > 0.0);
        assert!((m.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
