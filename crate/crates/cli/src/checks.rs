//! Self-checks behind `fracinv check --suite ...`.

use std::fmt;

use clap::ValueEnum;
use fracinv::diagnostics::{check_rci, duhamel_residual, RciInstance, RciVariant};
use fracinv::forward::{
    probe, solve_homogeneous_l1, solve_homogeneous_spectral, solve_inhomogeneous_l1, SpaceGrid,
    SpatialProfile, SpectralBasis,
};
use fracinv::fraccalc::{
    caputo_derivative, mittag_leffler, rgamma, rl_integral, FractionalOrder, TimeGrid, TimeSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Stage;
use crate::experiment::smooth_source;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Fraccalc,
    Forward,
    Rci,
    Duhamel,
}

/// One predicate: `value` compared against `limit` in the stated direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// `true` when `value >= limit` is required, else `value <= limit`.
    pub at_least: bool,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            at_least: false,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            at_least: true,
        }
    }

    pub fn passed(&self) -> bool {
        if self.at_least {
            self.value >= self.limit
        } else {
            self.value <= self.limit
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {:.3e} {} {:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            if self.at_least { ">=" } else { "<=" },
            self.limit
        )
    }
}

pub fn run_suite(suite: Suite) -> Result<Vec<CheckResult>, CliError> {
    match suite {
        Suite::Fraccalc => fraccalc_suite(),
        Suite::Forward => forward_suite(),
        Suite::Rci => rci_suite(1000, 0),
        Suite::Duhamel => duhamel_suite(),
    }
}

fn power_rule_errors(alpha: f64, p: f64, steps: usize) -> Result<(f64, f64), CliError> {
    let grid = TimeGrid::new(1.0, steps).stage("fraccalc")?;
    let order = FractionalOrder::new(alpha).stage("fraccalc")?;
    let f = TimeSeries::from_fn(grid, |t| t.powf(p)).stage("fraccalc")?;
    let gp = 1.0 / rgamma(p + 1.0);
    let caputo_exact =
        TimeSeries::from_fn(grid, |t| gp * rgamma(p + 1.0 - alpha) * t.powf(p - alpha))
            .stage("fraccalc")?;
    let rl_exact = TimeSeries::from_fn(grid, |t| gp * rgamma(p + 1.0 + alpha) * t.powf(p + alpha))
        .stage("fraccalc")?;
    let caputo = caputo_derivative(&f, order).stage("fraccalc")?;
    let rl = rl_integral(&f, alpha).stage("fraccalc")?;
    Ok((
        caputo.max_abs_diff(&caputo_exact).stage("fraccalc")?,
        rl.max_abs_diff(&rl_exact).stage("fraccalc")?,
    ))
}

/// Power rule on `t^p` over `Nt = 64, 128, 256`. Linear data is reproduced to
/// rounding; otherwise the observed order between the coarsest and finest
/// grid must reach `2 - alpha` up to 0.1.
pub fn fraccalc_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut out = Vec::new();
    for alpha in [0.3, 0.5, 0.9] {
        for p in [1.0, 2.0, 3.0] {
            let (c64, r64) = power_rule_errors(alpha, p, 64)?;
            let (c256, r256) = power_rule_errors(alpha, p, 256)?;
            for (op, coarse, fine) in [("caputo", c64, c256), ("rl integral", r64, r256)] {
                out.push(if p == 1.0 {
                    CheckResult::at_most(
                        format!("{op} t alpha={alpha} exact"),
                        coarse.max(fine),
                        1e-12,
                    )
                } else {
                    CheckResult::at_least(
                        format!("{op} t^{p} alpha={alpha} observed order"),
                        (coarse / fine).log(4.0),
                        1.9 - alpha,
                    )
                });
            }
        }
    }

    let ml = |a: f64, b: f64, z: f64| mittag_leffler(a, b, z).stage("mittag-leffler");
    let mut worst: f64 = 0.0;
    for z in [-10.0, -3.0, -0.4, 0.0, 0.3, 2.0] {
        worst = worst.max((ml(1.0, 1.0, z)? - f64::exp(z)).abs() / f64::exp(z).max(1.0));
    }
    out.push(CheckResult::at_most("E_{1,1}(z) = e^z", worst, 1e-10));
    let mut worst: f64 = 0.0;
    for t in [0.1, 0.7, 1.5, 3.0, 5.0] {
        worst = worst.max((ml(2.0, 1.0, -t * t)? - f64::cos(t)).abs());
    }
    out.push(CheckResult::at_most("E_{2,1}(-t^2) = cos t", worst, 1e-10));
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.3, 0.5), (0.9, 1.0), (0.5, 2.5), (1.5, 0.7)] {
        worst = worst.max((ml(a, b, 0.0)? - rgamma(b)).abs());
    }
    out.push(CheckResult::at_most(
        "E_{a,b}(0) = 1/Gamma(b)",
        worst,
        1e-10,
    ));
    Ok(out)
}

/// Sup-norm difference between L1 and spectral solutions over `t >= T/2`,
/// where the initial layer has decayed.
fn late_oracle_gap(alpha: f64, steps: usize) -> Result<f64, CliError> {
    let space = SpaceGrid::new(64).stage("forward")?;
    let time = TimeGrid::new(1.0, steps).stage("forward")?;
    let order = FractionalOrder::new(alpha).stage("forward")?;
    let g = SpatialProfile::sine_bump(space).stage("forward")?;
    let l1 = solve_homogeneous_l1(&g, order, time).stage("forward")?;
    let basis = SpectralBasis::new(64).stage("forward")?;
    let spectral = solve_homogeneous_spectral(&g, order, time, &basis).stage("forward")?;
    let mut gap: f64 = 0.0;
    for l in steps / 2..time.len() {
        for (a, b) in l1.row(l).iter().zip(spectral.row(l)) {
            gap = gap.max((a - b).abs());
        }
    }
    Ok(gap)
}

pub fn forward_suite() -> Result<Vec<CheckResult>, CliError> {
    let mut out = Vec::new();
    let space = SpaceGrid::new(64).stage("forward")?;
    let time = TimeGrid::new(1.0, 128).stage("forward")?;

    let g =
        SpatialProfile::from_fn(space, |x| (std::f64::consts::PI * x).sin()).stage("forward")?;
    let field = solve_homogeneous_l1(&g, FractionalOrder::new(1.0).stage("forward")?, time)
        .stage("forward")?;
    let pi2 = std::f64::consts::PI.powi(2);
    let mut err: f64 = 0.0;
    for l in 0..time.len() {
        let decay = (-pi2 * time.node(l)).exp();
        for (j, u) in field.row(l).iter().enumerate() {
            err = err.max((u - decay * g.values()[j]).abs());
        }
    }
    out.push(CheckResult::at_most(
        "alpha=1 vs exp(-pi^2 t) sin(pi x)",
        err,
        1e-3,
    ));

    for alpha in [0.3, 0.5, 0.9, 1.0] {
        let coarse = late_oracle_gap(alpha, 128)?;
        let fine = late_oracle_gap(alpha, 256)?;
        out.push(CheckResult::at_most(
            format!("alpha={alpha} L1 vs spectral on t >= T/2"),
            coarse,
            1e-3,
        ));
        out.push(CheckResult::at_least(
            format!("alpha={alpha} late gap reduction when Nt doubles"),
            coarse / fine,
            1.5,
        ));
    }

    let bump = SpatialProfile::sine_bump(space).stage("forward")?;
    let field = solve_homogeneous_l1(&bump, FractionalOrder::new(0.9).stage("forward")?, time)
        .stage("forward")?;
    let min = field.values().iter().copied().fold(f64::INFINITY, f64::min);
    out.push(CheckResult::at_least(
        "homogeneous solution stays nonnegative",
        min,
        -1e-12,
    ));
    Ok(out)
}

fn random_poly(rng: &mut impl Rng) -> Vec<f64> {
    let degree = rng.random_range(0..=5);
    (0..=degree).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Random valid instance built from polynomials of degree at most 5 with
/// coefficients in `[-1, 1]` (in the rescaled variable `s / (T0 + delta - eta)`).
/// `f2` is the absolute value of one; `f1` is another shifted by its largest
/// magnitude on the range where it must keep a sign, then given a random sign.
/// `eta`, `T0 - eta` and `delta` lie on a grid of width `1/64`.
pub fn random_rci_instance(
    rng: &mut impl Rng,
    variant: RciVariant,
) -> fracinv::Result<RciInstance> {
    let h = 1.0 / 64.0;
    let eta = h * rng.random_range(0..16) as f64;
    let split = rng.random_range(4..48);
    let t0 = eta + h * split as f64;
    let delta = h * rng.random_range(1..32) as f64;
    let steps = split + (delta / h).round() as usize;
    let grid = TimeGrid::new(steps as f64 * h, steps)?;

    let p = random_poly(rng);
    let q = random_poly(rng);
    let x = |s: f64| s / grid.horizon();
    let raw: Vec<f64> = grid.nodes().map(|s| horner(&p, x(s))).collect();
    let upto = match variant {
        RciVariant::A => steps,
        RciVariant::B => split,
    };
    let shift = raw[..=upto].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let f1 = raw.iter().map(|v| sign * (v + shift)).collect();
    let f2 = grid.nodes().map(|s| horner(&q, x(s)).abs()).collect();
    Ok(RciInstance {
        f1_shifted: TimeSeries::new(grid, f1)?,
        f2: TimeSeries::new(grid, f2)?,
        eta,
        t0,
        delta,
        variant,
    })
}

/// `count` random instances per variant; reports the smallest slack.
pub fn rci_suite(count: usize, seed: u64) -> Result<Vec<CheckResult>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for variant in [RciVariant::A, RciVariant::B] {
        let mut worst = f64::INFINITY;
        for _ in 0..count {
            let inst = random_rci_instance(&mut rng, variant).stage("rci")?;
            worst = worst.min(check_rci(&inst).stage("rci")?.slack);
        }
        out.push(CheckResult::at_least(
            format!("reverse convolution inequality ({variant:?}), min slack over {count}"),
            worst,
            -1e-10,
        ));
    }
    Ok(out)
}

/// Duhamel residual on the reference configuration with the smooth source.
pub fn duhamel_at(steps: usize) -> Result<f64, CliError> {
    let space = SpaceGrid::new(64).stage("duhamel")?;
    let time = TimeGrid::new(1.0, steps).stage("duhamel")?;
    let alpha = FractionalOrder::new(0.9).stage("duhamel")?;
    let g = SpatialProfile::sine_bump(space).stage("duhamel")?;
    let rho = TimeSeries::from_fn(time, smooth_source).stage("duhamel")?;
    let kernel = probe(
        &solve_homogeneous_l1(&g, alpha, time).stage("duhamel")?,
        0.125,
    )
    .stage("duhamel")?;
    let field = solve_inhomogeneous_l1(&g, &rho, alpha, time).stage("duhamel")?;
    duhamel_residual(&rho, &field, &kernel, alpha, 0.125).stage("duhamel")
}

pub fn duhamel_suite() -> Result<Vec<CheckResult>, CliError> {
    let coarse = duhamel_at(128)?;
    let fine = duhamel_at(256)?;
    Ok(vec![
        CheckResult::at_most("duhamel relative residual, 64x128", coarse, 5e-3),
        CheckResult::at_least(
            "duhamel residual reduction when Nt doubles",
            coarse / fine,
            1.5,
        ),
    ])
}
