//! Experiment configuration: flat key=value files merged with command-line
//! overrides, flags winning.

use crate::CliError;
use rfrk::Method;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub const DEFAULT_NOISE_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    AdvectionNoise,
    AdvectionSmooth,
    Dissipative,
    Oscillator,
    Burgers,
    StabilityRegions,
    Convergence,
}

impl FromStr for ExperimentId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "advection-noise" => Ok(Self::AdvectionNoise),
            "advection-smooth" => Ok(Self::AdvectionSmooth),
            "dissipative" => Ok(Self::Dissipative),
            "oscillator" => Ok(Self::Oscillator),
            "burgers" => Ok(Self::Burgers),
            "stability-regions" => Ok(Self::StabilityRegions),
            "convergence" => Ok(Self::Convergence),
            other => Err(format!(
                "unknown experiment `{other}` (expected advection-noise, advection-smooth, dissipative, oscillator, burgers, stability-regions, or convergence)"
            )),
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExperimentId::AdvectionNoise => "advection-noise",
            ExperimentId::AdvectionSmooth => "advection-smooth",
            ExperimentId::Dissipative => "dissipative",
            ExperimentId::Oscillator => "oscillator",
            ExperimentId::Burgers => "burgers",
            ExperimentId::StabilityRegions => "stability-regions",
            ExperimentId::Convergence => "convergence",
        };
        f.write_str(s)
    }
}

/// The one step-size parameter an experiment takes: a raw `dt`, a fraction
/// `mu` of the advection stability limit, or a Burgers CFL number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSpec {
    Dt(f64),
    Mu(f64),
    Cfl(f64),
}

impl StepSpec {
    pub fn label(&self) -> &'static str {
        match self {
            StepSpec::Dt(_) => "dt",
            StepSpec::Mu(_) => "mu",
            StepSpec::Cfl(_) => "cfl",
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            StepSpec::Dt(v) | StepSpec::Mu(v) | StepSpec::Cfl(v) => *v,
        }
    }
}

/// Fully resolved configuration for a single `run` invocation.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub scheme: String,
    pub mode: Method,
    pub k_override: Option<Vec<f64>>,
    pub step: StepSpec,
    pub t_end: f64,
    pub seed: u64,
    pub out: PathBuf,
}

/// Partially specified configuration, as read from a file or from flags.
#[derive(Debug, Clone, Default)]
pub struct ConfigOverlay {
    pub experiment: Option<String>,
    pub scheme: Option<String>,
    pub mode: Option<String>,
    pub dt: Option<f64>,
    pub mu: Option<f64>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub seed: Option<u64>,
    pub k: Option<String>,
    pub out: Option<String>,
}

impl ConfigOverlay {
    /// Values from `self` win over `base`.
    pub fn over(self, base: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            experiment: self.experiment.or(base.experiment),
            scheme: self.scheme.or(base.scheme),
            mode: self.mode.or(base.mode),
            dt: self.dt.or(base.dt),
            mu: self.mu.or(base.mu),
            cfl: self.cfl.or(base.cfl),
            t_end: self.t_end.or(base.t_end),
            seed: self.seed.or(base.seed),
            k: self.k.or(base.k),
            out: self.out.or(base.out),
        }
    }

    pub fn resolve(self) -> Result<ExperimentConfig, CliError> {
        let experiment: ExperimentId = self
            .experiment
            .as_deref()
            .ok_or_else(|| CliError::Config("missing `experiment`".into()))?
            .parse()
            .map_err(CliError::Config)?;
        let scheme = self.scheme.unwrap_or_else(|| "RK44".to_string());
        let mode: Method = self
            .mode
            .as_deref()
            .unwrap_or("classical")
            .parse()
            .map_err(CliError::Config)?;
        let k_override = match self.k {
            None => None,
            Some(text) => Some(parse_k_list(&text)?),
        };

        let given = [
            self.dt.map(StepSpec::Dt),
            self.mu.map(StepSpec::Mu),
            self.cfl.map(StepSpec::Cfl),
        ]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
        if given.len() != 1 {
            return Err(CliError::Config(format!(
                "exactly one of dt/mu/cfl must be given, got {}",
                given.len()
            )));
        }
        let step = given[0];
        let expected = match experiment {
            ExperimentId::AdvectionNoise | ExperimentId::AdvectionSmooth => "mu",
            ExperimentId::Burgers => "cfl",
            _ => "dt",
        };
        if step.label() != expected {
            return Err(CliError::Config(format!(
                "experiment `{experiment}` takes `{expected}`, not `{}`",
                step.label()
            )));
        }
        if step.value().is_nan() || step.value() <= 0.0 {
            return Err(CliError::Config(format!(
                "{} must be positive, got {}",
                step.label(),
                step.value()
            )));
        }

        let t_end = match self.t_end {
            Some(v) if v > 0.0 => v,
            Some(v) => {
                return Err(CliError::Config(format!("t_end must be positive, got {v}")));
            }
            None => match experiment {
                ExperimentId::AdvectionNoise | ExperimentId::AdvectionSmooth => 1.0,
                ExperimentId::Oscillator => 100.0,
                ExperimentId::Burgers => 2.0,
                ExperimentId::Dissipative => step.value(), // one step
                _ => {
                    return Err(CliError::Config(format!(
                        "experiment `{experiment}` is not runnable via `run`; use the dedicated subcommand"
                    )));
                }
            },
        };

        Ok(ExperimentConfig {
            experiment,
            scheme,
            mode,
            k_override,
            step,
            t_end,
            seed: self.seed.unwrap_or(DEFAULT_NOISE_SEED),
            out: PathBuf::from(self.out.unwrap_or_else(|| "out".to_string())),
        })
    }
}

/// Comma-separated floats, e.g. `1,2,-2,-1`.
pub fn parse_k_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad k entry `{tok}`")))
        })
        .collect()
}

/// Comma-separated positive floats for dt/CFL lists.
pub fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, CliError> = text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad {what} entry `{tok}`")))
        })
        .collect();
    let vals = vals?;
    if vals.iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err(CliError::Config(format!("{what} entries must be positive")));
    }
    Ok(vals)
}

/// Reads a flat `key=value` file; `#` starts a comment, blank lines ignored.
pub fn parse_config_file(path: &Path) -> Result<ConfigOverlay, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut overlay = ConfigOverlay::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        let bad = |what: &str| {
            CliError::Config(format!(
                "{}:{}: bad {what} `{value}`",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "experiment" => overlay.experiment = Some(value),
            "scheme" => overlay.scheme = Some(value),
            "mode" => overlay.mode = Some(value),
            "dt" => overlay.dt = Some(value.parse().map_err(|_| bad("dt"))?),
            "mu" => overlay.mu = Some(value.parse().map_err(|_| bad("mu"))?),
            "cfl" => overlay.cfl = Some(value.parse().map_err(|_| bad("cfl"))?),
            "t_end" => overlay.t_end = Some(value.parse().map_err(|_| bad("t_end"))?),
            "seed" => overlay.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "k" => overlay.k = Some(value),
            "out" => overlay.out = Some(value),
            other => {
                return Err(CliError::Config(format!(
                    "{}:{}: unknown key `{other}`",
                    path.display(),
                    lineno + 1
                )));
            }
        }
    }
    Ok(overlay)
}
