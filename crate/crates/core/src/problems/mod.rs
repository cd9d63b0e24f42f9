//! The test problems: spectral advection, a 3x3 dissipative linear system
//! with a singular-vector initial condition, a conservative nonlinear
//! oscillator with a closed-form solution, and Burgers with the
//! energy-conservative symmetric flux.

pub mod spectral;

pub use spectral::{
    dft_amplitudes, dft_coefficients, fourier_grid, relative_amplification, smooth_init,
    smooth_profile, white_noise_init, GridError, SpectralGrid, SplitMix64,
};

use crate::stability::{imaginary_axis_limit, stability_polynomial, StabilityError};
use crate::state::State;
use crate::tableau::{builtin_tableau, ButcherTableau};
use thiserror::Error;

/// How the exact flow moves energy: `<u, f> = 0` everywhere (conservative),
/// `<u, f> <= 0` (dissipative), or no such structure (generic).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConservationClass {
    Conservative,
    Dissipative,
    Generic,
}

type RhsFn = Box<dyn Fn(f64, &State) -> State + Send + Sync>;
type ExactFn = Box<dyn Fn(f64) -> State + Send + Sync>;

/// An ODE right-hand side over a real inner-product state, with an optional
/// exact solution.
pub struct Problem {
    dimension: usize,
    description: String,
    conservation_class: ConservationClass,
    rhs: RhsFn,
    exact: Option<ExactFn>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("dimension", &self.dimension)
            .field("description", &self.description)
            .field("conservation_class", &self.conservation_class)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

impl Problem {
    pub fn new<F>(dimension: usize, description: impl Into<String>, rhs: F) -> Self
    where
        F: Fn(f64, &State) -> State + Send + Sync + 'static,
    {
        Problem {
            dimension,
            description: description.into(),
            conservation_class: ConservationClass::Generic,
            rhs: Box::new(rhs),
            exact: None,
        }
    }

    pub fn with_class(mut self, class: ConservationClass) -> Self {
        self.conservation_class = class;
        self
    }

    pub fn with_exact<F>(mut self, exact: F) -> Self
    where
        F: Fn(f64) -> State + Send + Sync + 'static,
    {
        self.exact = Some(Box::new(exact));
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn conservation_class(&self) -> ConservationClass {
        self.conservation_class
    }

    pub fn rhs(&self, t: f64, u: &State) -> State {
        (self.rhs)(t, u)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_at(&self, t: f64) -> Option<State> {
        self.exact.as_ref().map(|f| f(t))
    }
}

#[derive(Debug, Error)]
pub enum SingularVectorError {
    #[error(
        "power iteration did not converge within {iterations} iterations (degenerate spectrum?)"
    )]
    NonConvergence { iterations: usize },
}

/// Linear advection `u' = -D u` on the given spectral grid; conservative by
/// skew-symmetry of `D`.
pub fn advection_problem(g: &SpectralGrid) -> Problem {
    let grid = g.clone();
    let m = g.point_count();
    Problem::new(
        m,
        format!("fourier spectral advection, m = {m}"),
        move |_, u| {
            let du = grid.apply(u.components());
            State::new(du.into_iter().map(|v| -v).collect())
        },
    )
    .with_class(ConservationClass::Conservative)
}

/// Largest step size with all advection eigenvalues `+/- i k`, `k <= m/2 - 1`,
/// inside the scheme's imaginary-axis stability interval.
pub fn dt_max(t: &ButcherTableau, m: usize) -> Result<f64, StabilityError> {
    let p = stability_polynomial(t);
    let limit = imaginary_axis_limit(&p, 1e-9)?;
    Ok(limit / (m as f64 / 2.0 - 1.0))
}

const DISSIPATIVE_L: [[f64; 3]; 3] = [[-1.0, -2.0, -2.0], [0.0, -1.0, -2.0], [0.0, 0.0, -1.0]];

/// The 3x3 energy-decaying system `u' = L u` together with its initial
/// condition: the first right singular vector of `R(0.5 L)`, where `R` is the
/// RK44 stability polynomial, unit norm, first nonzero component positive.
pub fn dissipative_system() -> (Problem, State) {
    let problem = Problem::new(3, "3x3 dissipative linear system", |_, u| {
        let mut out = [0.0; 3];
        for (i, row) in DISSIPATIVE_L.iter().enumerate() {
            out[i] = row[0] * u[0] + row[1] * u[1] + row[2] * u[2];
        }
        State::new(out.to_vec())
    })
    .with_class(ConservationClass::Dissipative);

    let rk44 = builtin_tableau("RK44").expect("registered");
    let poly = stability_polynomial(&rk44);
    let half_l: Vec<Vec<f64>> = DISSIPATIVE_L
        .iter()
        .map(|row| row.iter().map(|v| 0.5 * v).collect())
        .collect();
    let r_matrix = matrix_polynomial(poly.coeffs(), &half_l);
    let u0 = right_singular_vector(&r_matrix).expect("distinct singular values");
    (problem, State::new(u0))
}

/// Horner evaluation of `sum_j d_j M^j` for a small square matrix.
fn matrix_polynomial(coeffs: &[f64], m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut acc = vec![vec![0.0; n]; n];
    for d in coeffs.iter().rev() {
        acc = mat_mul(&acc, m);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += d;
        }
    }
    acc
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

const POWER_ITERATION_CAP: usize = 100_000;

/// Dominant right singular vector of a small square matrix by power iteration
/// on `M^T M`, deterministic start `[1, ..., 1]/sqrt(n)`, residual tolerance
/// `1e-12 * sigma^2`, sign fixed so the first nonzero component is positive.
pub fn right_singular_vector(m: &[Vec<f64>]) -> Result<Vec<f64>, SingularVectorError> {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|row| row.len() == n), "square matrix");
    // MtM once
    let mut mtm = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            mtm[i][j] = m.iter().map(|row| row[i] * row[j]).sum();
        }
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..POWER_ITERATION_CAP {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| mtm[i][j] * v[j]).sum())
            .collect();
        let sigma2: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let residual: f64 = v
            .iter()
            .zip(&w)
            .map(|(vi, wi)| {
                let r = wi - sigma2 * vi;
                r * r
            })
            .sum::<f64>()
            .sqrt();
        if residual <= 1e-12 * sigma2.abs().max(1e-300) {
            fix_sign(&mut v);
            return Ok(v);
        }
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            // M annihilates v; any unit vector is a valid answer
            fix_sign(&mut v);
            return Ok(v);
        }
        v = w.into_iter().map(|x| x / norm).collect();
    }
    Err(SingularVectorError::NonConvergence {
        iterations: POWER_ITERATION_CAP,
    })
}

fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Conservative nonlinear oscillator `u' = [-u2, u1] / ||u||^2` with exact
/// solution `[cos t, sin t]` from the standard initial state `[1, 0]`.
pub fn oscillator_problem() -> Problem {
    Problem::new(2, "nonlinear oscillator", |_, u| {
        let n2 = u[0] * u[0] + u[1] * u[1];
        State::new(vec![-u[1] / n2, u[0] / n2])
    })
    .with_class(ConservationClass::Conservative)
    .with_exact(|t| State::new(vec![t.cos(), t.sin()]))
}

/// Two-point symmetric flux `(a^2 + a b + b^2) / 6`; telescoping it keeps the
/// semi-discrete Burgers energy exactly constant. Evaluated through the
/// commutative forms `a + b` and `a * b` so swapping the arguments is
/// bit-exact.
pub fn burgers_flux(a: f64, b: f64) -> f64 {
    let s = a + b;
    let p = a * b;
    (s * s - p) / 6.0
}

/// Periodic finite-volume Burgers on `[-1, 1]` with `n_points` cells and the
/// energy-conservative flux; returns the problem and the Gaussian initial
/// profile `exp(-30 x^2)`.
pub fn burgers_problem(n_points: usize) -> (Problem, State) {
    assert!(n_points >= 3, "need at least 3 cells");
    let n = n_points;
    let dx = 2.0 / n as f64;
    let x: Vec<f64> = (0..n).map(|i| -1.0 + i as f64 * dx).collect();
    let u0 = State::new(x.iter().map(|xi| (-30.0 * xi * xi).exp()).collect());
    let problem = Problem::new(
        n,
        format!("periodic Burgers, {n} cells, energy-conservative flux"),
        move |_, u| {
            let mut flux = vec![0.0; n];
            for i in 0..n {
                let next = if i + 1 == n { 0 } else { i + 1 };
                flux[i] = burgers_flux(u[i], u[next]);
            }
            let mut out = vec![0.0; n];
            for i in 0..n {
                let prev = if i == 0 { n - 1 } else { i - 1 };
                out[i] = -(flux[i] - flux[prev]) / dx;
            }
            State::new(out)
        },
    )
    .with_class(ConservationClass::Conservative);
    (problem, u0)
}
