//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored, every key is optional and
//! defaults to the reference experiment. Sample lists are comma separated.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum SourceProfile {
    SineBump,
    /// Nodal values of `g`, one per space node.
    Samples(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrueSource {
    /// `sin(2 pi t) + 10 t`
    Smooth,
    /// `3t` on `[0, 1/3]`, `1` on `(1/3, 2/3)`, `3t - 1` on `[2/3, 1]`
    Piecewise,
    /// Nodal values of `rho`, or `None` when only observations are given.
    Samples(Option<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantName {
    Plain,
    Shifted,
    Mollified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub horizon: f64,
    pub nx: usize,
    pub nt: usize,
    pub x0: f64,
    pub g: SourceProfile,
    pub rho_true: TrueSource,
    /// Observations `u(x0, t_l)`; replaces the synthetic forward solve.
    pub data_samples: Option<Vec<f64>>,
    pub sigma: f64,
    pub seed: u64,
    pub k: f64,
    pub stop_eps: f64,
    pub max_iters: usize,
    pub variant: VariantName,
    pub mollifier_radius: f64,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            horizon: 1.0,
            nx: 64,
            nt: 128,
            x0: 0.125,
            g: SourceProfile::SineBump,
            rho_true: TrueSource::Smooth,
            data_samples: None,
            sigma: 0.0,
            seed: 0,
            k: 0.2,
            stop_eps: 1e-5,
            max_iters: 5000,
            variant: VariantName::Plain,
            mollifier_radius: 5.0 / 128.0,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        let mut g_kind: Option<String> = None;
        let mut g_samples = None;
        let mut rho_kind: Option<String> = None;
        let mut rho_samples = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Usage(format!("config line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(bad(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            match key {
                "alpha" => cfg.alpha = num(value).map_err(bad)?,
                "T" => cfg.horizon = num(value).map_err(bad)?,
                "Nx" => cfg.nx = num(value).map_err(bad)?,
                "Nt" => cfg.nt = num(value).map_err(bad)?,
                "x0" => cfg.x0 = num(value).map_err(bad)?,
                "g_spec" => g_kind = Some(value.to_string()),
                "g_samples" => g_samples = Some(list(value).map_err(bad)?),
                "rho_true_spec" => rho_kind = Some(value.to_string()),
                "rho_samples" => rho_samples = Some(list(value).map_err(bad)?),
                "data_samples" => cfg.data_samples = Some(list(value).map_err(bad)?),
                "sigma" => cfg.sigma = num(value).map_err(bad)?,
                "seed" => cfg.seed = num(value).map_err(bad)?,
                "K" => cfg.k = num(value).map_err(bad)?,
                "stop_eps" => cfg.stop_eps = num(value).map_err(bad)?,
                "max_iters" => cfg.max_iters = num(value).map_err(bad)?,
                "variant" => cfg.variant = value.parse().map_err(bad)?,
                "mollifier_radius" => cfg.mollifier_radius = num(value).map_err(bad)?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }

        cfg.g = match (g_kind.as_deref(), g_samples) {
            (None | Some("sine_bump"), None) => SourceProfile::SineBump,
            (None | Some("custom_samples"), Some(v)) => SourceProfile::Samples(v),
            (Some("custom_samples"), None) => {
                return Err(CliError::Usage(
                    "g_spec = custom_samples needs g_samples".into(),
                ))
            }
            (Some(other), _) => {
                return Err(CliError::Usage(format!(
                    "g_spec must be sine_bump or custom_samples (with g_samples), got `{other}`"
                )))
            }
        };
        cfg.rho_true = match (rho_kind.as_deref(), rho_samples) {
            (None | Some("smooth"), None) => TrueSource::Smooth,
            (Some("piecewise"), None) => TrueSource::Piecewise,
            (None | Some("custom_samples"), Some(v)) => TrueSource::Samples(Some(v)),
            (Some("custom_samples"), None) => TrueSource::Samples(None),
            (Some(other), _) => {
                return Err(CliError::Usage(format!(
                    "rho_true_spec must be smooth, piecewise or custom_samples \
                     (rho_samples only with custom_samples), got `{other}`"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Usage(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return fail(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return fail(format!("T must be positive, got {}", self.horizon));
        }
        if self.nx < 2 || self.nt < 2 {
            return fail(format!(
                "need Nx >= 2 and Nt >= 2, got {} and {}",
                self.nx, self.nt
            ));
        }
        let pos = self.x0 * self.nx as f64;
        if !(self.x0 > 0.0 && self.x0 < 1.0) || (pos - pos.round()).abs() > 1e-9 {
            return fail(format!(
                "x0 must be an interior node, i.e. x0 * Nx an integer in (0, Nx); got x0 = {}",
                self.x0
            ));
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return fail(format!("sigma must be nonnegative, got {}", self.sigma));
        }
        if !(self.k > 0.0 && self.stop_eps > 0.0 && self.max_iters > 0) {
            return fail("K, stop_eps and max_iters must be positive".into());
        }
        // written negated so NaN is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.mollifier_radius > 0.0) {
            return fail(format!(
                "mollifier_radius must be positive, got {}",
                self.mollifier_radius
            ));
        }
        if self.variant == VariantName::Mollified && self.mollifier_radius >= self.horizon {
            return fail(format!(
                "mollifier_radius {} must be smaller than T = {}",
                self.mollifier_radius, self.horizon
            ));
        }
        if let SourceProfile::Samples(v) = &self.g {
            if v.len() != self.nx + 1 {
                return fail(format!(
                    "g_samples needs Nx + 1 = {} values, got {}",
                    self.nx + 1,
                    v.len()
                ));
            }
        }
        for (name, v) in [
            ("rho_samples", self.rho_samples()),
            ("data_samples", self.data_samples.as_deref()),
        ] {
            if let Some(v) = v {
                if v.len() != self.nt + 1 {
                    return fail(format!(
                        "{name} needs Nt + 1 = {} values, got {}",
                        self.nt + 1,
                        v.len()
                    ));
                }
            }
        }
        if self.rho_true == TrueSource::Samples(None) && self.data_samples.is_none() {
            return fail("custom_samples without rho_samples needs data_samples".into());
        }
        Ok(())
    }

    fn rho_samples(&self) -> Option<&[f64]> {
        match &self.rho_true {
            TrueSource::Samples(Some(v)) => Some(v),
            _ => None,
        }
    }

    /// Serialises every key; `parse(to_config_string())` gives back `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("alpha", self.alpha.to_string());
        put("T", self.horizon.to_string());
        put("Nx", self.nx.to_string());
        put("Nt", self.nt.to_string());
        put("x0", self.x0.to_string());
        match &self.g {
            SourceProfile::SineBump => put("g_spec", "sine_bump".into()),
            SourceProfile::Samples(v) => {
                put("g_spec", "custom_samples".into());
                put("g_samples", join(v));
            }
        }
        match &self.rho_true {
            TrueSource::Smooth => put("rho_true_spec", "smooth".into()),
            TrueSource::Piecewise => put("rho_true_spec", "piecewise".into()),
            TrueSource::Samples(v) => {
                put("rho_true_spec", "custom_samples".into());
                if let Some(v) = v {
                    put("rho_samples", join(v));
                }
            }
        }
        if let Some(v) = &self.data_samples {
            put("data_samples", join(v));
        }
        put("sigma", self.sigma.to_string());
        put("seed", self.seed.to_string());
        put("K", self.k.to_string());
        put("stop_eps", self.stop_eps.to_string());
        put("max_iters", self.max_iters.to_string());
        put("variant", self.variant.to_string());
        put("mollifier_radius", self.mollifier_radius.to_string());
        if let Some(dir) = &self.output_dir {
            put("output_dir", dir.display().to_string());
        }
        s
    }
}

fn num<T: FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("cannot parse `{value}` as a number"))
}

fn list(value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(|v| num(v.trim())).collect()
}

// f64 Display is the shortest string that parses back to the same value.
fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

impl FromStr for VariantName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(Self::Plain),
            "shifted" => Ok(Self::Shifted),
            "mollified" => Ok(Self::Mollified),
            _ => Err(format!(
                "variant must be plain, shifted or mollified, got `{s}`"
            )),
        }
    }
}

impl fmt::Display for VariantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plain => "plain",
            Self::Shifted => "shifted",
            Self::Mollified => "mollified",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default() {
        let cfg = ExperimentConfig::parse("# nothing here\n\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn keys_and_comments() {
        let cfg = ExperimentConfig::parse(
            "alpha = 0.5  # order\nrho_true_spec = piecewise\nvariant = mollified\nsigma=0.05\n",
        )
        .unwrap();
        assert_eq!(cfg.alpha, 0.5);
        assert_eq!(cfg.rho_true, TrueSource::Piecewise);
        assert_eq!(cfg.variant, VariantName::Mollified);
        assert_eq!(cfg.sigma, 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "alpha = 1.5",
            "colour = red",
            "alpha = 0.5\nalpha = 0.6",
            "x0 = 0.13",
            "Nt = many",
            "variant = fancy",
            "g_spec = custom_samples",
            "rho_true_spec = custom_samples",
            "rho_samples = 0, 1",
            "no equals sign",
        ] {
            assert!(
                matches!(ExperimentConfig::parse(text), Err(CliError::Usage(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn round_trip_with_samples() {
        let cfg = ExperimentConfig {
            nx: 4,
            nt: 2,
            x0: 0.25,
            g: SourceProfile::Samples(vec![0.0, 0.1, 1.0 / 3.0, 0.2, 0.0]),
            rho_true: TrueSource::Samples(Some(vec![0.0, 0.7, 1e-17])),
            sigma: 0.012_345_678_901_234_5,
            output_dir: Some(PathBuf::from("runs/a")),
            ..ExperimentConfig::default()
        };
        let text = cfg.to_config_string();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }
}
