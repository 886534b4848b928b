//! The reconstruction pipeline behind `run` and `sweep`, and its CSV artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fracinv::forward::{
    probe, solve_homogeneous_l1, solve_inhomogeneous_l1, SpaceGrid, SpatialProfile,
};
use fracinv::fraccalc::{FractionalOrder, MollifierSpec, TimeGrid, TimeSeries};
use fracinv::inverse::{add_noise, reconstruct, IterationConfig, ReconstructionTrace, Variant};

use crate::config::{ExperimentConfig, SourceProfile, TrueSource, VariantName};
use crate::error::Stage;
use crate::CliError;

/// Smooth test source `sin(2 pi t) + 10 t`.
pub fn smooth_source(t: f64) -> f64 {
    (2.0 * std::f64::consts::PI * t).sin() + 10.0 * t
}

/// Continuous piecewise-linear test source: `3t`, then `1`, then `3t - 1`.
pub fn piecewise_source(t: f64) -> f64 {
    if t <= 1.0 / 3.0 {
        3.0 * t
    } else if t < 2.0 / 3.0 {
        1.0
    } else {
        3.0 * t - 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub iterations_used: usize,
    pub converged: bool,
    /// `None` when no truth is known.
    pub relative_l2_error: Option<f64>,
    pub max_error: Option<f64>,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

/// Everything a run computed, before anything is written.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub truth: Option<TimeSeries>,
    /// Noiseless observation `u(x0, t)`.
    pub u_star: TimeSeries,
    /// Observation handed to the iteration.
    pub w_sigma: TimeSeries,
    pub kernel: TimeSeries,
    pub trace: ReconstructionTrace,
    pub summary: RunSummary,
}

impl RunOutput {
    pub fn rho_hat(&self) -> &TimeSeries {
        self.trace.last()
    }
}

/// Runs the pipeline in memory: kernel, synthetic data, noise, iteration.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    cfg.validate()?;
    let alpha = FractionalOrder::new(cfg.alpha).stage("config")?;
    let space = SpaceGrid::new(cfg.nx).stage("config")?;
    let time = TimeGrid::new(cfg.horizon, cfg.nt).stage("config")?;
    space.node_index(cfg.x0).stage("config")?;

    let g = match &cfg.g {
        SourceProfile::SineBump => SpatialProfile::sine_bump(space),
        SourceProfile::Samples(v) => SpatialProfile::from_samples(space, v.clone()),
    }
    .stage("source profile")?;

    let homogeneous = solve_homogeneous_l1(&g, alpha, time).stage("kernel")?;
    let kernel = probe(&homogeneous, cfg.x0).stage("kernel")?;

    let truth = match &cfg.rho_true {
        TrueSource::Smooth => Some(TimeSeries::from_fn(time, smooth_source)),
        TrueSource::Piecewise => Some(TimeSeries::from_fn(time, piecewise_source)),
        TrueSource::Samples(Some(v)) => Some(TimeSeries::new(time, v.clone())),
        TrueSource::Samples(None) => None,
    }
    .transpose()
    .stage("true source")?;

    let u_star = match (&cfg.data_samples, &truth) {
        (Some(v), _) => TimeSeries::new(time, v.clone()).stage("observation")?,
        (None, Some(rho)) => {
            let field = solve_inhomogeneous_l1(&g, rho, alpha, time).stage("forward")?;
            probe(&field, cfg.x0).stage("forward")?
        }
        (None, None) => unreachable!("validate demands data or truth"),
    };
    let w_sigma = add_noise(&u_star, cfg.sigma, cfg.seed).stage("noise")?;

    let variant = match cfg.variant {
        VariantName::Plain => Variant::Plain,
        VariantName::Shifted => Variant::Shifted,
        VariantName::Mollified => {
            Variant::Mollified(MollifierSpec::new(cfg.mollifier_radius).stage("config")?)
        }
    };
    let icfg = IterationConfig::new(cfg.k, cfg.stop_eps)
        .stage("config")?
        .with_variant(variant)
        .with_max_iters(cfg.max_iters);

    let start = Instant::now();
    let trace = reconstruct(&w_sigma, &kernel, alpha, &icfg).stage("reconstruct")?;
    let wall_time_s = start.elapsed().as_secs_f64();

    let (relative_l2_error, max_error) = match &truth {
        Some(rho) => {
            let err = trace.last().sub(rho).stage("summary")?;
            let norm = rho.l2_norm();
            let rel = if norm > 0.0 {
                err.l2_norm() / norm
            } else {
                err.l2_norm()
            };
            (Some(rel), Some(err.max_abs()))
        }
        None => (None, None),
    };
    let summary = RunSummary {
        iterations_used: trace.iterations_used,
        converged: trace.converged,
        relative_l2_error,
        max_error,
        wall_time_s,
        config: cfg.clone(),
    };
    Ok(RunOutput {
        truth,
        u_star,
        w_sigma,
        kernel,
        trace,
        summary,
    })
}

/// Runs and writes `trace.csv`, `iterations.csv`, `summary.csv` and
/// `config.txt` into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary, CliError> {
    let output = execute(cfg)?;
    write_outputs(&output, out)?;
    Ok(output.summary)
}

/// Seventeen significant digits, enough to round-trip any f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(CliError::io(path))
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

pub fn write_outputs(output: &RunOutput, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let grid = output.u_star.grid();
    let rho_hat = output.rho_hat();

    write_csv(
        &out.join("trace.csv"),
        &["t", "rho_true", "rho_hat", "u_star", "w_sigma", "kernel_v"],
        (0..grid.len()).map(|l| {
            vec![
                fmt(grid.node(l)),
                fmt_opt(output.truth.as_ref().map(|r| r[l])),
                fmt(rho_hat[l]),
                fmt(output.u_star[l]),
                fmt(output.w_sigma[l]),
                fmt(output.kernel[l]),
            ]
        }),
    )?;

    let mut rows = Vec::with_capacity(output.trace.update_norms.len());
    for (m, update) in output.trace.update_norms.iter().enumerate() {
        let iterate = &output.trace.iterates[m + 1];
        let err = match &output.truth {
            Some(rho) => Some(iterate.sub(rho).stage("summary")?.l2_norm()),
            None => None,
        };
        rows.push(vec![(m + 1).to_string(), fmt(*update), fmt_opt(err)]);
    }
    write_csv(
        &out.join("iterations.csv"),
        &["m", "update_l2", "error_l2"],
        rows,
    )?;

    let s = &output.summary;
    write_csv(
        &out.join("summary.csv"),
        &[
            "iterations_used",
            "converged",
            "relative_l2_error",
            "max_error",
            "wall_time_s",
            "config",
        ],
        [vec![
            s.iterations_used.to_string(),
            s.converged.to_string(),
            fmt_opt(s.relative_l2_error),
            fmt_opt(s.max_error),
            fmt(s.wall_time_s),
            "config.txt".to_string(),
        ]],
    )?;

    let path = out.join("config.txt");
    fs::write(&path, s.config.to_config_string()).map_err(CliError::io(path))
}

/// Parameters a sweep may vary.
pub const SWEEP_PARAMS: [&str; 4] = ["sigma", "alpha", "Nt", "mollifier_radius"];

/// One run per value, in `out/{param}_{index:03}`, with seed `cfg.seed + index`
/// and an `index.csv` listing them. An empty list writes nothing.
pub fn sweep(
    cfg: &ExperimentConfig,
    param: &str,
    values: &[f64],
    out: &Path,
) -> Result<Vec<RunSummary>, CliError> {
    if !SWEEP_PARAMS.contains(&param) {
        return Err(CliError::Usage(format!(
            "cannot sweep `{param}`; choose one of {}",
            SWEEP_PARAMS.join(", ")
        )));
    }
    let mut configs = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let mut c = cfg.clone();
        match param {
            "sigma" => c.sigma = value,
            "alpha" => c.alpha = value,
            "mollifier_radius" => c.mollifier_radius = value,
            _ => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(CliError::Usage(format!(
                        "Nt must be a whole number, got {value}"
                    )));
                }
                c.nt = value as usize;
            }
        }
        c.seed = cfg.seed.wrapping_add(i as u64);
        c.output_dir = None;
        c.validate()?;
        configs.push(c);
    }

    let mut summaries = Vec::with_capacity(configs.len());
    let mut rows = Vec::with_capacity(configs.len());
    for (i, (c, value)) in configs.iter().zip(values).enumerate() {
        let dir: PathBuf = format!("{param}_{i:03}").into();
        let s = run_experiment(c, &out.join(&dir))?;
        rows.push(vec![
            i.to_string(),
            value.to_string(),
            c.seed.to_string(),
            s.iterations_used.to_string(),
            s.converged.to_string(),
            fmt_opt(s.relative_l2_error),
            fmt_opt(s.max_error),
            dir.display().to_string(),
        ]);
        summaries.push(s);
    }
    if !rows.is_empty() {
        write_csv(
            &out.join("index.csv"),
            &[
                "index",
                param,
                "seed",
                "iterations_used",
                "converged",
                "relative_l2_error",
                "max_error",
                "dir",
            ],
            rows,
        )?;
    }
    Ok(summaries)
}
