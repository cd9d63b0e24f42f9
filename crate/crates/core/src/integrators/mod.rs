//! The four steppers (classical, IDT, relaxation, relaxation-free), the
//! per-step energy bookkeeping they share, and a fixed-step driver.
//!
//! All energy algebra runs through one Gram matrix of stage derivatives per
//! step: the spurious drift of a classical step, the relaxation factor gamma,
//! and the coefficients of the relaxation-free quadratic are different
//! contractions of the same s x s matrix.

mod quadratic;

pub use quadratic::{solve_epsilon, NoRealRoot, QuadraticCoeffs};

use crate::problems::Problem;
use crate::state::{energy, gram, inner, linear_combination, GramMatrix, State};
use crate::tableau::{ButcherTableau, KVector};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Relaxation factors at or below this are treated as a stall.
pub const GAMMA_STALL_TOL: f64 = 1e-8;
/// Relative threshold on `||sum b_j f_j||^2` for the gamma degenerate branch.
pub const GAMMA_DEGENERACY_TOL: f64 = 1e-28;
/// Factor for the epsilon-quadratic degeneracy threshold, scaled by
/// `max|k|^2 * max|G|`.
pub const EPSILON_DEGENERACY_FACTOR: f64 = 1e-14;
/// Errors at or below this are considered roundoff in convergence fits.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Which update rule advances the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Classical,
    Idt,
    Relaxation,
    RelaxationFree,
}

impl Method {
    pub fn requires_k(self) -> bool {
        matches!(self, Method::RelaxationFree)
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "classical" => Ok(Method::Classical),
            "idt" => Ok(Method::Idt),
            "r" => Ok(Method::Relaxation),
            "rf" => Ok(Method::RelaxationFree),
            other => Err(format!(
                "unknown mode `{other}` (expected classical, idt, r, or rf)"
            )),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Classical => "classical",
            Method::Idt => "idt",
            Method::Relaxation => "r",
            Method::RelaxationFree => "rf",
        };
        f.write_str(s)
    }
}

/// Per-step control variable recorded alongside the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    None,
    Gamma(f64),
    Epsilon(f64),
}

impl Control {
    pub fn gamma(self) -> Option<f64> {
        match self {
            Control::Gamma(g) => Some(g),
            _ => None,
        }
    }

    pub fn epsilon(self) -> Option<f64> {
        match self {
            Control::Epsilon(e) => Some(e),
            _ => None,
        }
    }
}

/// One accepted step.
#[derive(Debug, Clone)]
pub struct StepRecord {
    /// Time at the end of the step.
    pub t: f64,
    pub state: State,
    pub energy: f64,
    pub control: Control,
    /// Time actually advanced: `gamma * dt` in relaxation mode, `dt` otherwise.
    pub effective_dt: f64,
}

/// Stage solutions, stage derivatives, their Gram matrix, and the
/// semi-discretization terms `<y_j, f_j>`.
#[derive(Debug, Clone)]
pub struct StageData {
    pub y: Vec<State>,
    pub f: Vec<State>,
    pub gram: GramMatrix,
    /// `<y_j, f_j>` per stage; diagnostic only, never used in the gamma or
    /// epsilon algebra.
    pub uf_terms: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum StepError {
    #[error("stage {stage} derivative not finite at t = {time}")]
    NonFiniteStage { stage: usize, time: f64 },
    #[error("updated state not finite")]
    NonFiniteState,
    #[error("relaxation stalled: gamma = {gamma:e}")]
    StalledRelaxation { gamma: f64 },
    #[error("no real root for the energy quadratic (discriminant {discriminant:e}); step size too large for the relaxation-free update")]
    NoRealRoot { discriminant: f64 },
}

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("step size must be positive, got {0}")]
    InvalidStepSize(f64),
    #[error("t_end must be greater than t0")]
    InvalidSpan,
    #[error("(t_end - t0)/dt = {ratio} is not within 1e-9 of an integer")]
    NonCommensurate { ratio: f64 },
    #[error("relaxation-free mode needs a k vector")]
    MissingKVector,
    #[error("step {step} failed at t = {time}: {source}")]
    Step {
        step: usize,
        time: f64,
        source: StepError,
    },
}

#[derive(Debug, Error)]
pub enum ConvergenceError {
    #[error("problem has no exact solution to measure errors against")]
    NoExactSolution,
    #[error("fewer than 2 errors above the roundoff floor; cannot fit a slope")]
    TooFewPoints,
    #[error(transparent)]
    Integration(#[from] IntegrateError),
}

/// Evaluates all stage solutions and derivatives for one step.
///
/// Stages are filled in order using the strictly lower-triangular `A`; each
/// derivative is checked for finiteness as it is produced.
pub fn compute_stages<F>(
    t: &ButcherTableau,
    rhs: F,
    tn: f64,
    u: &State,
    dt: f64,
) -> Result<StageData, StepError>
where
    F: Fn(f64, &State) -> State,
{
    let s = t.stages();
    let mut y: Vec<State> = Vec::with_capacity(s);
    let mut f: Vec<State> = Vec::with_capacity(s);
    for i in 0..s {
        let coeffs = &t.a_row(i)[..i];
        let yi = linear_combination(u, dt, coeffs, &f[..i]);
        let fi = rhs(tn + t.c()[i] * dt, &yi);
        if !fi.is_finite() {
            return Err(StepError::NonFiniteStage { stage: i, time: tn });
        }
        y.push(yi);
        f.push(fi);
    }
    let gram = gram(&f);
    let uf_terms = (0..s).map(|j| inner(&y[j], &f[j])).collect();
    Ok(StageData {
        y,
        f,
        gram,
        uf_terms,
    })
}

fn sum_b_a_g(t: &ButcherTableau, g: &GramMatrix) -> f64 {
    g.weighted_matrix_sum(t.b(), &|i, j| t.a(i, j))
}

/// Spurious energy of one classical step:
/// `dt^2 (sum b_i b_j G_ij - 2 sum b_i a_ij G_ij)`.
pub fn energy_drift(t: &ButcherTableau, sd: &StageData, dt: f64) -> f64 {
    let b = t.b();
    dt * dt * (sd.gram.bilinear(b, b) - 2.0 * sum_b_a_g(t, &sd.gram))
}

/// Plain Runge-Kutta update.
pub fn classical_step(
    t: &ButcherTableau,
    sd: &StageData,
    u: &State,
    tn: f64,
    dt: f64,
) -> Result<StepRecord, StepError> {
    let state = linear_combination(u, dt, t.b(), &sd.f);
    if !state.is_finite() {
        return Err(StepError::NonFiniteState);
    }
    let e = energy(&state);
    Ok(StepRecord {
        t: tn + dt,
        energy: e,
        state,
        control: Control::None,
        effective_dt: dt,
    })
}

/// Relaxation factor cancelling the spurious energy of this step.
pub fn gamma_relaxation(t: &ButcherTableau, sd: &StageData) -> f64 {
    let b = t.b();
    let den = sd.gram.bilinear(b, b); // = ||sum b_j f_j||^2
    if den <= GAMMA_DEGENERACY_TOL * sd.gram.max_abs() {
        return 1.0;
    }
    2.0 * sum_b_a_g(t, &sd.gram) / den
}

fn relaxed_state(
    t: &ButcherTableau,
    sd: &StageData,
    u: &State,
    dt: f64,
) -> Result<(State, f64), StepError> {
    let g = gamma_relaxation(t, sd);
    if g <= GAMMA_STALL_TOL {
        return Err(StepError::StalledRelaxation { gamma: g });
    }
    let coeffs: Vec<f64> = t.b().iter().map(|bj| g * bj).collect();
    let state = linear_combination(u, dt, &coeffs, &sd.f);
    if !state.is_finite() {
        return Err(StepError::NonFiniteState);
    }
    Ok((state, g))
}

/// Relaxation update: scaled weights, time advanced by `gamma * dt`.
pub fn rrk_step(
    t: &ButcherTableau,
    sd: &StageData,
    u: &State,
    tn: f64,
    dt: f64,
) -> Result<StepRecord, StepError> {
    let (state, g) = relaxed_state(t, sd, u, dt)?;
    let e = energy(&state);
    Ok(StepRecord {
        t: tn + g * dt,
        energy: e,
        state,
        control: Control::Gamma(g),
        effective_dt: g * dt,
    })
}

/// Incremental-direction update: the relaxed state, but time advances by the
/// full `dt`.
pub fn idt_step(
    t: &ButcherTableau,
    sd: &StageData,
    u: &State,
    tn: f64,
    dt: f64,
) -> Result<StepRecord, StepError> {
    let (state, g) = relaxed_state(t, sd, u, dt)?;
    let e = energy(&state);
    Ok(StepRecord {
        t: tn + dt,
        energy: e,
        state,
        control: Control::Gamma(g),
        effective_dt: dt,
    })
}

/// Assembles the epsilon quadratic from the Gram matrix:
/// `A* = sum k_i k_j G_ij`,
/// `B* = 2 (sum k_i b_j G_ij - sum k_i a_ij G_ij)`,
/// `C* = sum b_i b_j G_ij - 2 sum b_i a_ij G_ij`.
pub fn epsilon_coefficients(t: &ButcherTableau, k: &KVector, sd: &StageData) -> QuadraticCoeffs {
    let b = t.b();
    let kv = k.entries();
    let g = &sd.gram;
    let a_star = g.bilinear(kv, kv);
    let b_star = -2.0 * g.weighted_matrix_sum(kv, &|i, j| t.a(i, j)) + 2.0 * g.bilinear(kv, b);
    let c_star = -2.0 * sum_b_a_g(t, g) + g.bilinear(b, b);
    QuadraticCoeffs::new(a_star, b_star, c_star)
}

/// Relaxation-free update with perturbed weights `b_j + k_j * epsilon`.
pub fn rfrk_step(
    t: &ButcherTableau,
    k: &KVector,
    sd: &StageData,
    u: &State,
    tn: f64,
    dt: f64,
) -> Result<StepRecord, StepError> {
    let q = epsilon_coefficients(t, k, sd);
    let tol = EPSILON_DEGENERACY_FACTOR * k.max_abs() * k.max_abs() * sd.gram.max_abs();
    let eps = solve_epsilon(&q, tol).map_err(|e| StepError::NoRealRoot {
        discriminant: e.discriminant,
    })?;
    let coeffs: Vec<f64> = t
        .b()
        .iter()
        .zip(k.entries())
        .map(|(bj, kj)| bj + kj * eps)
        .collect();
    debug_assert!((coeffs.iter().sum::<f64>() - 1.0).abs() <= 1e-14 * (1.0 + eps.abs()));
    let state = linear_combination(u, dt, &coeffs, &sd.f);
    if !state.is_finite() {
        return Err(StepError::NonFiniteState);
    }
    let e = energy(&state);
    Ok(StepRecord {
        t: tn + dt,
        energy: e,
        state,
        control: Control::Epsilon(eps),
        effective_dt: dt,
    })
}

fn one_step(
    method: Method,
    t: &ButcherTableau,
    k: Option<&KVector>,
    problem: &Problem,
    u: &State,
    tn: f64,
    dt: f64,
) -> Result<StepRecord, StepError> {
    let sd = compute_stages(t, |tt, uu| problem.rhs(tt, uu), tn, u, dt)?;
    match method {
        Method::Classical => classical_step(t, &sd, u, tn, dt),
        Method::Relaxation => rrk_step(t, &sd, u, tn, dt),
        Method::Idt => idt_step(t, &sd, u, tn, dt),
        Method::RelaxationFree => {
            let k = k.expect("checked by integrate");
            rfrk_step(t, k, &sd, u, tn, dt)
        }
    }
}

/// Fixed-step integration driver.
///
/// For all modes the requested `dt` is used for every step. Outside
/// relaxation mode the step count is `round((t_end - t0)/dt)`, and that ratio
/// must sit within 1e-9 of an integer; relaxation mode instead marches until
/// the accumulated effective time reaches `t_end`, without truncating the
/// final step. Records are kept every `record_every` steps plus always the
/// final one. On a step failure the run aborts with the failing step index
/// and time attached.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    problem: &Problem,
    method: Method,
    t: &ButcherTableau,
    k: Option<&KVector>,
    u0: &State,
    t0: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Vec<StepRecord>, IntegrateError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(IntegrateError::InvalidStepSize(dt));
    }
    if t_end.is_nan() || t_end <= t0 {
        return Err(IntegrateError::InvalidSpan);
    }
    if method.requires_k() && k.is_none() {
        return Err(IntegrateError::MissingKVector);
    }
    let stride = record_every.max(1);
    let mut records = Vec::new();
    let mut u = u0.clone();

    if method == Method::Relaxation {
        let span = t_end - t0;
        let mut tn = t0;
        let mut step_index = 0usize;
        while tn < t_end - 1e-12 * span {
            step_index += 1;
            let rec = one_step(method, t, k, problem, &u, tn, dt).map_err(|source| {
                IntegrateError::Step {
                    step: step_index,
                    time: tn,
                    source,
                }
            })?;
            tn = rec.t;
            u = rec.state.clone();
            let done = tn >= t_end - 1e-12 * span;
            if step_index.is_multiple_of(stride) || done {
                records.push(rec);
            }
        }
        return Ok(records);
    }

    let ratio = (t_end - t0) / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 || n < 1.0 {
        return Err(IntegrateError::NonCommensurate { ratio });
    }
    let n = n as usize;
    for i in 0..n {
        let tn = t0 + i as f64 * dt;
        let mut rec =
            one_step(method, t, k, problem, &u, tn, dt).map_err(|source| IntegrateError::Step {
                step: i + 1,
                time: tn,
                source,
            })?;
        // pin the clock to multiples of dt; no accumulated end-time drift
        rec.t = t0 + (i + 1) as f64 * dt;
        u = rec.state.clone();
        if (i + 1).is_multiple_of(stride) || i + 1 == n {
            records.push(rec);
        }
    }
    Ok(records)
}

/// Final-time error for one step size, as measured by [`convergence_study`].
#[derive(Debug, Clone, Copy)]
pub struct ConvergencePoint {
    pub dt: f64,
    /// Time at which the error was measured (the actual final time of the
    /// run, which for relaxation mode is where the relaxed steps landed).
    pub final_time: f64,
    pub error: f64,
    pub used_in_fit: bool,
}

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of log(error) against log(dt) over the points
    /// above [`ROUNDOFF_FLOOR`].
    pub slope: f64,
}

/// Measures final-time errors against the problem's exact solution over a
/// decreasing list of step sizes and fits the convergence order.
///
/// Each run uses `round((t_end - t0)/dt)` steps, and the error is evaluated
/// at the run's actual final time, so step sizes need not divide the window
/// exactly.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    problem: &Problem,
    method: Method,
    t: &ButcherTableau,
    k: Option<&KVector>,
    u0: &State,
    t0: f64,
    dts: &[f64],
    t_end: f64,
) -> Result<ConvergenceStudy, ConvergenceError> {
    if !problem.has_exact() {
        return Err(ConvergenceError::NoExactSolution);
    }
    let mut points = Vec::with_capacity(dts.len());
    for &dt in dts {
        let steps = ((t_end - t0) / dt).round().max(1.0);
        let run_end = t0 + steps * dt;
        let records = integrate(problem, method, t, k, u0, t0, dt, run_end, usize::MAX)?;
        let last = records.last().expect("at least one step");
        let exact = problem.exact_at(last.t).expect("has_exact checked above");
        let error = crate::state::l2_distance(&last.state, &exact);
        points.push(ConvergencePoint {
            dt,
            final_time: last.t,
            error,
            used_in_fit: error > ROUNDOFF_FLOOR,
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.used_in_fit)
        .map(|p| (p.dt, p.error))
        .collect();
    if fit.len() < 2 {
        return Err(ConvergenceError::TooFewPoints);
    }
    Ok(ConvergenceStudy {
        slope: fit_log_slope(&fit),
        points,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for (x, y) in points {
        sx += x.ln();
        sy += y.ln();
    }
    let (xbar, ybar) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, y) in points {
        let dx = x.ln() - xbar;
        num += dx * (y.ln() - ybar);
        den += dx * dx;
    }
    num / den
}
