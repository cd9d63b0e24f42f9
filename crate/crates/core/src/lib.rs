//! Explicit Runge-Kutta time integration with energy control.
//!
//! Alongside the classical update, three energy-conserving step variants are
//! provided, all driven by the same per-step Gram matrix of stage
//! derivatives:
//!
//! - **R** (relaxation): scales the update and the time increment by a
//!   per-step factor gamma, cancelling the spurious energy change at the cost
//!   of relaxed step sizes.
//! - **IDT** (incremental direction): the same scaled update while keeping
//!   the nominal step size; costs one order of accuracy.
//! - **RF** (relaxation-free): perturbs the quadrature weights by
//!   `k_j * epsilon_n`, with epsilon solving a per-step quadratic, conserving
//!   energy at a fixed step size without losing order.
//!
//! The crate also carries the supporting cast: a Butcher tableau registry
//! with order-condition checks, stability polynomials and region scans, and
//! the four standard test problems (spectral advection, a 3x3 dissipative
//! system, a nonlinear oscillator, periodic Burgers).
//!
//! See `rfrk-cli` for the experiment harness built on top of this crate.

pub mod integrators;
pub mod problems;
pub mod stability;
pub mod state;
pub mod tableau;

pub use integrators::{
    classical_step, compute_stages, convergence_study, energy_drift, epsilon_coefficients,
    gamma_relaxation, idt_step, integrate, rfrk_step, rrk_step, solve_epsilon, Control,
    ConvergenceStudy, IntegrateError, Method, QuadraticCoeffs, StageData, StepError, StepRecord,
};
pub use problems::{
    advection_problem, burgers_problem, dissipative_system, dt_max, fourier_grid,
    oscillator_problem, ConservationClass, Problem, SpectralGrid,
};
pub use stability::{
    eval_poly, imaginary_axis_limit, region_scan, rf_polynomial, stability_polynomial,
    StabilityPolynomial,
};
pub use state::{energy, gram, inner, linear_combination, GramMatrix, State};
pub use tableau::{
    builtin_k_vector, builtin_tableau, check_order_conditions, validate_k, validate_tableau,
    ButcherTableau, KVector, BUILTIN_SCHEMES,
};
