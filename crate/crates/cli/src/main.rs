use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use fracinv_cli::checks::{run_suite, Suite};
use fracinv_cli::{run_experiment, sweep, CliError, ExperimentConfig, OUTPUT_ROOT_ENV};

/// Reconstruct the temporal source of a time-fractional diffusion equation
/// from single-point observations.
#[derive(Debug, Parser)]
#[command(name = "fracinv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its CSV artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory [default: $FRACINV_OUTPUT_ROOT/<config name>, or ./runs/<config name>]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run one experiment per value of a parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of sigma, alpha, Nt, mollifier_radius.
        #[arg(long)]
        param: String,
        /// Comma-separated; an empty list runs nothing.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite; exits with 2 if any check fails.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::parse(&text)
}

fn output_dir(explicit: Option<PathBuf>, cfg: &ExperimentConfig, config_path: &Path) -> PathBuf {
    explicit
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| {
            let root = env::var_os(OUTPUT_ROOT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("runs"));
            let stem = config_path.file_stem().unwrap_or("run".as_ref());
            root.join(stem)
        })
}

fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| CliError::Usage(format!("cannot parse sweep value `{v}`")))
        })
        .collect()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.4e}"))
        .unwrap_or_else(|| "n/a".into())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let dir = output_dir(out, &cfg, &config);
            let s = run_experiment(&cfg, &dir)?;
            println!(
                "iterations_used={} converged={} relative_l2_error={} max_error={} wall_time_s={:.3}",
                s.iterations_used,
                s.converged,
                fmt_opt(s.relative_l2_error),
                fmt_opt(s.max_error),
                s.wall_time_s
            );
            println!("wrote {}", dir.display());
        }
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => {
            let values = parse_values(&values)?;
            let cfg = load(&config)?;
            let dir = output_dir(out, &cfg, &config);
            let summaries = sweep(&cfg, &param, &values, &dir)?;
            for (v, s) in values.iter().zip(&summaries) {
                println!(
                    "{param}={v} iterations_used={} converged={} relative_l2_error={}",
                    s.iterations_used,
                    s.converged,
                    fmt_opt(s.relative_l2_error)
                );
            }
            if !summaries.is_empty() {
                println!("wrote {}", dir.display());
            }
        }
        Command::Check { suite } => {
            let results = run_suite(suite)?;
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed()).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed { failed });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
