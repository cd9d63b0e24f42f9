//! Shared fixtures for the benchmark targets.

use rfrk::problems::{
    advection_problem, burgers_problem, fourier_grid, oscillator_problem, white_noise_init, Problem,
};
use rfrk::state::State;
use rfrk::tableau::{builtin_k_vector, builtin_tableau, ButcherTableau, KVector};

pub struct Fixture {
    pub label: &'static str,
    pub problem: Problem,
    pub u0: State,
    pub dt: f64,
}

/// The three step-cost fixtures: small nonlinear, medium finite-volume,
/// dense spectral.
pub fn fixtures() -> Vec<Fixture> {
    let oscillator = Fixture {
        label: "oscillator-m2",
        problem: oscillator_problem(),
        u0: State::new(vec![1.0, 0.0]),
        dt: 0.1,
    };
    let (problem, u0) = burgers_problem(50);
    let burgers = Fixture {
        label: "burgers-m50",
        problem,
        u0,
        dt: 0.012,
    };
    let grid = fourier_grid(128).expect("even grid");
    let advection = Fixture {
        label: "advection-m128",
        problem: advection_problem(&grid),
        u0: white_noise_init(128, 42),
        dt: 0.03,
    };
    vec![oscillator, burgers, advection]
}

pub fn rk44() -> (ButcherTableau, KVector) {
    let t = builtin_tableau("RK44").expect("registered");
    let k = builtin_k_vector(&t).expect("builtin k");
    (t, k)
}
