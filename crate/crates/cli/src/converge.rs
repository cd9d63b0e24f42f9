//! Convergence tables: per-(scheme, dt) final-time errors with least-squares
//! slopes, for the oscillator (closed-form reference) and Burgers (fine
//! reference integration landing on each run's actual final time).

use crate::artifacts::{fmt_float, write_csv};
use crate::config::ExperimentId;
use crate::runner::resolve_k;
use crate::CliError;
use rfrk::integrators::{fit_log_slope, integrate, Method, ROUNDOFF_FLOOR};
use rfrk::problems::{burgers_problem, oscillator_problem};
use rfrk::state::{l2_distance, State};
use rfrk::tableau::builtin_tableau;
use std::collections::HashMap;
use std::path::Path;

pub struct ConvergeSpec {
    pub experiment: ExperimentId,
    pub schemes: Vec<String>,
    pub mode: Method,
    pub k_override: Option<Vec<f64>>,
    /// Interpreted as raw `dt` for the oscillator and as CFL numbers for
    /// Burgers.
    pub step_values: Vec<f64>,
    pub t_end: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub scheme: String,
    pub mode: Method,
    pub dt: f64,
    pub final_time: f64,
    /// `None` when the run aborted; excluded from the fit.
    pub error: Option<f64>,
    pub used_in_fit: bool,
}

#[derive(Debug, Clone)]
pub struct SchemeSlope {
    pub scheme: String,
    pub mode: Method,
    pub slope: Option<f64>,
    pub points_used: usize,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub slopes: Vec<SchemeSlope>,
}

/// Reference Burgers solutions from a fifth-order classical integration with
/// steps near 5e-5, chosen per target time so the reference lands exactly on
/// it. Cached per distinct time.
pub struct BurgersReference {
    cache: HashMap<u64, State>,
}

impl BurgersReference {
    pub fn new() -> Self {
        BurgersReference {
            cache: HashMap::new(),
        }
    }

    pub fn at(&mut self, t_target: f64) -> State {
        let key = t_target.to_bits();
        if let Some(s) = self.cache.get(&key) {
            return s.clone();
        }
        let (p, u0) = burgers_problem(50);
        let t = builtin_tableau("BSRK85").expect("registered");
        let n = (t_target / 5e-5).ceil().max(1.0);
        let dt = t_target / n;
        let recs = integrate(
            &p,
            Method::Classical,
            &t,
            None,
            &u0,
            0.0,
            dt,
            t_target,
            usize::MAX,
        )
        .expect("reference integration");
        let state = recs.last().unwrap().state.clone();
        self.cache.insert(key, state.clone());
        state
    }
}

impl Default for BurgersReference {
    fn default() -> Self {
        Self::new()
    }
}

/// Runs the full (scheme, step) matrix and fits one slope per scheme over
/// the errors above the roundoff floor. Run failures land in their row and
/// are excluded from the fit.
pub fn convergence_table(spec: &ConvergeSpec) -> Result<ConvergenceTable, CliError> {
    let (problem, u0, step_to_dt): (_, _, Box<dyn Fn(f64) -> f64>) = match spec.experiment {
        ExperimentId::Oscillator => {
            let p = oscillator_problem();
            (p, State::new(vec![1.0, 0.0]), Box::new(|v: f64| v))
        }
        ExperimentId::Burgers => {
            let (p, u0) = burgers_problem(50);
            let dx = 2.0 / 50.0;
            (p, u0, Box::new(move |v: f64| v * dx))
        }
        other => {
            return Err(CliError::Config(format!(
                "convergence tables are defined for oscillator and burgers, not `{other}`"
            )));
        }
    };
    let mut reference = BurgersReference::new();

    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for scheme in &spec.schemes {
        let tableau = builtin_tableau(scheme).map_err(|e| CliError::Config(e.to_string()))?;
        let k = resolve_k(&tableau, spec.mode, &spec.k_override)?;
        let mut fit_points = Vec::new();
        for &value in &spec.step_values {
            let dt = step_to_dt(value);
            let steps = (spec.t_end / dt).round().max(1.0);
            let t_end = steps * dt;
            let row = match integrate(
                &problem,
                spec.mode,
                &tableau,
                k.as_ref(),
                &u0,
                0.0,
                dt,
                t_end,
                usize::MAX,
            ) {
                Ok(recs) => {
                    let last = recs.last().unwrap();
                    let exact = match spec.experiment {
                        ExperimentId::Oscillator => problem.exact_at(last.t).unwrap(),
                        _ => reference.at(last.t),
                    };
                    let error = l2_distance(&last.state, &exact);
                    let used = error > ROUNDOFF_FLOOR;
                    if used {
                        fit_points.push((dt, error));
                    }
                    ConvergenceRow {
                        scheme: tableau.name().to_string(),
                        mode: spec.mode,
                        dt,
                        final_time: last.t,
                        error: Some(error),
                        used_in_fit: used,
                    }
                }
                Err(_) => ConvergenceRow {
                    scheme: tableau.name().to_string(),
                    mode: spec.mode,
                    dt,
                    final_time: f64::NAN,
                    error: None,
                    used_in_fit: false,
                },
            };
            rows.push(row);
        }
        slopes.push(SchemeSlope {
            scheme: tableau.name().to_string(),
            mode: spec.mode,
            slope: (fit_points.len() >= 2).then(|| fit_log_slope(&fit_points)),
            points_used: fit_points.len(),
        });
    }
    Ok(ConvergenceTable { rows, slopes })
}

/// Writes `<prefix>_errors.csv` and `<prefix>_slopes.csv`.
pub fn write_table(table: &ConvergenceTable, out: &Path, prefix: &str) -> Result<(), CliError> {
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.scheme,
                r.mode,
                fmt_float(r.dt),
                if r.final_time.is_nan() {
                    String::new()
                } else {
                    fmt_float(r.final_time)
                },
                r.error.map(fmt_float).unwrap_or_default(),
                r.used_in_fit
            )
        })
        .collect();
    write_csv(
        &out.join(format!("{prefix}_errors.csv")),
        "scheme,mode,dt,final_time,error,used_in_fit",
        &rows,
    )?;
    let rows: Vec<String> = table
        .slopes
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{}",
                s.scheme,
                s.mode,
                s.slope.map(fmt_float).unwrap_or_default(),
                s.points_used
            )
        })
        .collect();
    write_csv(
        &out.join(format!("{prefix}_slopes.csv")),
        "scheme,mode,slope,points_used",
        &rows,
    )
}
