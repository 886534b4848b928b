use fracinv::diagnostics::{check_rci, compute_b_delta, kernel_mass, RciInstance, RciVariant};
use fracinv::fraccalc::{TimeGrid, TimeSeries};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..=1.0f64, 1..=6)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reverse_convolution_inequality(
        p in poly(),
        q in poly(),
        eta_n in 0usize..16,
        split in 4usize..48,
        delta_n in 1usize..32,
        negate in any::<bool>(),
        late_sign_change in any::<bool>(),
    ) {
        let h = 1.0 / 64.0;
        let steps = split + delta_n;
        let grid = TimeGrid::new(steps as f64 * h, steps).unwrap();
        let variant = if late_sign_change { RciVariant::B } else { RciVariant::A };
        let upto = if late_sign_change { split } else { steps };
        let raw: Vec<f64> = grid.nodes().map(|s| horner(&p, s)).collect();
        let shift = raw[..=upto].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let sign = if negate { -1.0 } else { 1.0 };
        let eta = eta_n as f64 * h;
        let inst = RciInstance {
            f1_shifted: TimeSeries::new(grid, raw.iter().map(|v| sign * (v + shift)).collect()).unwrap(),
            f2: TimeSeries::from_fn(grid, |s| horner(&q, s).abs()).unwrap(),
            eta,
            t0: eta + split as f64 * h,
            delta: delta_n as f64 * h,
            variant,
        };
        let report = check_rci(&inst).unwrap();
        prop_assert!(report.slack >= -1e-10, "{report:?}");
    }

    #[test]
    fn b_delta_inverts_kernel_mass(vals in prop::collection::vec(0.01..1.0f64, 65), delta in 0.001..1.0f64) {
        let kernel = TimeSeries::new(TimeGrid::new(1.0, 64).unwrap(), vals).unwrap();
        let b = compute_b_delta(&kernel, delta).unwrap();
        prop_assert!((b * kernel_mass(&kernel, delta).unwrap() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn b_delta_nonincreasing(vals in prop::collection::vec(0.0..1.0f64, 65), d1 in 0.01..1.0f64, d2 in 0.01..1.0f64) {
        let kernel = TimeSeries::new(TimeGrid::new(1.0, 64).unwrap(), vals).unwrap();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        if let (Ok(a), Ok(b)) = (compute_b_delta(&kernel, lo), compute_b_delta(&kernel, hi)) {
            prop_assert!(b <= a * (1.0 + 1e-14));
        }
    }
}
