//! Single-experiment runs: problem setup from a config, integration, CSV
//! artifacts, and the run summary.

use crate::artifacts::{fmt_float, write_amplification, write_kv, write_profile, write_timeseries};
use crate::config::{ExperimentConfig, ExperimentId};
use crate::CliError;
use rfrk::integrators::{integrate, IntegrateError, Method, StepRecord};
use rfrk::problems::{
    advection_problem, burgers_problem, dft_amplitudes, dissipative_system, dt_max, fourier_grid,
    relative_amplification, smooth_init, white_noise_init, Problem,
};
use rfrk::state::{energy, l2_distance, State};
use rfrk::tableau::{builtin_k_vector, builtin_tableau, validate_k, ButcherTableau, KVector};
use std::path::PathBuf;

/// Everything needed to integrate one configured experiment.
pub struct PreparedRun {
    pub problem: Problem,
    pub u0: State,
    pub tableau: ButcherTableau,
    pub k: Option<KVector>,
    pub dt: f64,
    /// Commensurated end time `steps * dt`.
    pub t_end: f64,
    pub name: String,
    pub grid_nodes: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunFailure {
    pub step: usize,
    pub time: f64,
    pub reason: String,
}

/// Outcome of one run, mirroring what the summary file records.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub name: String,
    pub steps: usize,
    pub final_time: f64,
    pub final_energy: f64,
    pub energy_drift: f64,
    pub max_abs_epsilon: Option<f64>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub first_effective_dt: Option<f64>,
    pub error_vs_exact: Option<f64>,
    pub failure: Option<RunFailure>,
}

impl RunSummary {
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![
            ("name".into(), self.name.clone()),
            ("steps".into(), self.steps.to_string()),
            ("final_time".into(), fmt_float(self.final_time)),
            ("final_energy".into(), fmt_float(self.final_energy)),
            ("energy_drift".into(), fmt_float(self.energy_drift)),
        ];
        let opt = |pairs: &mut Vec<(String, String)>, key: &str, v: Option<f64>| {
            pairs.push((key.into(), v.map(fmt_float).unwrap_or_default()));
        };
        opt(&mut pairs, "max_abs_epsilon", self.max_abs_epsilon);
        opt(&mut pairs, "gamma_min", self.gamma_min);
        opt(&mut pairs, "gamma_max", self.gamma_max);
        opt(&mut pairs, "first_effective_dt", self.first_effective_dt);
        opt(&mut pairs, "error_vs_exact", self.error_vs_exact);
        pairs.push(("failed".into(), self.failure.is_some().to_string()));
        if let Some(f) = &self.failure {
            pairs.push(("failure_step".into(), f.step.to_string()));
            pairs.push(("failure_time".into(), fmt_float(f.time)));
            pairs.push(("failure_reason".into(), f.reason.clone()));
        }
        pairs
    }
}

/// Resolves the k vector for a run: an explicit override is validated, else
/// relaxation-free mode uses the scheme's builtin pairing.
pub fn resolve_k(
    tableau: &ButcherTableau,
    mode: Method,
    k_override: &Option<Vec<f64>>,
) -> Result<Option<KVector>, CliError> {
    match k_override {
        Some(raw) => validate_k(tableau, raw)
            .map(Some)
            .map_err(|e| CliError::Config(format!("invalid k vector: {e}"))),
        None if mode.requires_k() => builtin_k_vector(tableau).map(Some).ok_or_else(|| {
            CliError::Config(format!(
                "no builtin k vector for `{}`; pass --k",
                tableau.name()
            ))
        }),
        None => Ok(None),
    }
}

/// Builds the problem, initial state, and commensurated time window for a
/// configured experiment.
pub fn prepare(config: &ExperimentConfig) -> Result<PreparedRun, CliError> {
    let tableau = builtin_tableau(&config.scheme).map_err(|e| CliError::Config(e.to_string()))?;
    let k = resolve_k(&tableau, config.mode, &config.k_override)?;

    let (problem, u0, dt, grid_nodes) = match config.experiment {
        ExperimentId::AdvectionNoise | ExperimentId::AdvectionSmooth => {
            let grid = fourier_grid(128).map_err(|e| CliError::Config(e.to_string()))?;
            let u0 = match config.experiment {
                ExperimentId::AdvectionNoise => white_noise_init(128, config.seed),
                _ => smooth_init(&grid),
            };
            let mu = config.step.value();
            let stable = dt_max(&tableau, 128).map_err(|e| {
                CliError::Config(format!(
                    "no stable advection step for {}: {e}",
                    config.scheme
                ))
            })?;
            let nodes = grid.nodes().to_vec();
            (advection_problem(&grid), u0, mu * stable, Some(nodes))
        }
        ExperimentId::Dissipative => {
            let (p, u0) = dissipative_system();
            (p, u0, config.step.value(), None)
        }
        ExperimentId::Oscillator => {
            let p = rfrk::problems::oscillator_problem();
            (p, State::new(vec![1.0, 0.0]), config.step.value(), None)
        }
        ExperimentId::Burgers => {
            let (p, u0) = burgers_problem(50);
            let dx = 2.0 / 50.0;
            let nodes: Vec<f64> = (0..50).map(|i| -1.0 + i as f64 * dx).collect();
            (p, u0, config.step.value() * dx, Some(nodes))
        }
        other => {
            return Err(CliError::Config(format!(
                "experiment `{other}` is not runnable via `run`"
            )));
        }
    };

    let steps = (config.t_end / dt).round().max(1.0);
    let t_end = steps * dt;
    let name = format!(
        "{}_{}_{}_{}{}",
        config.experiment,
        tableau.name(),
        config.mode,
        config.step.label(),
        config.step.value()
    );
    Ok(PreparedRun {
        problem,
        u0,
        tableau,
        k,
        dt,
        t_end,
        name,
        grid_nodes,
    })
}

/// Integrates a prepared run, splitting a step failure off from hard errors.
pub fn execute(
    prepared: &PreparedRun,
    mode: Method,
) -> Result<(Vec<StepRecord>, Option<RunFailure>), CliError> {
    match integrate(
        &prepared.problem,
        mode,
        &prepared.tableau,
        prepared.k.as_ref(),
        &prepared.u0,
        0.0,
        prepared.dt,
        prepared.t_end,
        1,
    ) {
        Ok(records) => Ok((records, None)),
        Err(IntegrateError::Step { step, time, source }) => Ok((
            Vec::new(),
            Some(RunFailure {
                step,
                time,
                reason: source.to_string(),
            }),
        )),
        Err(other) => Err(CliError::Config(other.to_string())),
    }
}

pub fn summarize(
    name: &str,
    prepared: &PreparedRun,
    records: &[StepRecord],
    failure: Option<RunFailure>,
) -> RunSummary {
    let e0 = energy(&prepared.u0);
    let last = records.last();
    let eps: Vec<f64> = records.iter().filter_map(|r| r.control.epsilon()).collect();
    let gammas: Vec<f64> = records.iter().filter_map(|r| r.control.gamma()).collect();
    let error_vs_exact = last.and_then(|l| {
        prepared
            .problem
            .exact_at(l.t)
            .map(|exact| l2_distance(&l.state, &exact))
    });
    RunSummary {
        name: name.to_string(),
        steps: records.len(),
        final_time: last.map(|l| l.t).unwrap_or(0.0),
        final_energy: last.map(|l| l.energy).unwrap_or(e0),
        energy_drift: last.map(|l| l.energy - e0).unwrap_or(0.0),
        max_abs_epsilon: eps
            .iter()
            .map(|e| e.abs())
            .fold(None, |m, e| Some(m.map_or(e, |mm: f64| mm.max(e)))),
        gamma_min: gammas
            .iter()
            .cloned()
            .fold(None, |m, g| Some(m.map_or(g, |mm: f64| mm.min(g)))),
        gamma_max: gammas
            .iter()
            .cloned()
            .fold(None, |m, g| Some(m.map_or(g, |mm: f64| mm.max(g)))),
        first_effective_dt: records.first().map(|r| r.effective_dt),
        error_vs_exact,
        failure,
    }
}

/// Runs one configured experiment and writes its artifacts:
/// `<name>_timeseries.csv`, experiment-specific CSVs, and
/// `<name>_summary.txt`. Integration failures are recorded in the summary
/// rather than returned as errors.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, CliError> {
    let prepared = prepare(config)?;
    let (records, failure) = execute(&prepared, config.mode)?;
    let summary = summarize(&prepared.name.clone(), &prepared, &records, failure);

    let base: PathBuf = config.out.join(&prepared.name);
    let path = |suffix: &str| -> PathBuf {
        let mut p = base.clone();
        let file = format!("{}_{suffix}", p.file_name().unwrap().to_string_lossy());
        p.set_file_name(file);
        p
    };

    write_timeseries(&path("timeseries.csv"), 0.0, energy(&prepared.u0), &records)?;

    if let (Some(nodes), Some(last)) = (&prepared.grid_nodes, records.last()) {
        write_profile(
            &path("profile.csv"),
            nodes,
            prepared.u0.components(),
            last.state.components(),
        )?;
        if matches!(
            config.experiment,
            ExperimentId::AdvectionNoise | ExperimentId::AdvectionSmooth
        ) {
            let a0 = dft_amplitudes(&prepared.u0);
            let af = dft_amplitudes(&last.state);
            let rel = relative_amplification(&a0, &af);
            write_amplification(&path("amplification.csv"), &a0, &af, &rel)?;
        }
    }

    write_kv(&path("summary.txt"), &summary.to_pairs())?;
    Ok(summary)
}
