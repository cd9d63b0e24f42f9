//! Acceptance suite: one test per criterion, each printing a single
//! `criterion NN <name>: PASS/FAIL` line (run with `--nocapture` to see them
//! on success).
//!
//! Criterion 08 asserts the two-sided epsilon scaling window at the exact
//! rate 2^-(p-1) for all four schemes. On this oscillator the even-order
//! schemes contract faster (at 2^-p), so the SSPRK22 and RK44 parts of that
//! window are expected to fail; the test states the measured ratios when it
//! does. All other criteria pass.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rfrk::integrators::{
    compute_stages, convergence_study, energy_drift, integrate, solve_epsilon, Method,
    QuadraticCoeffs,
};
use rfrk::problems::{
    advection_problem, burgers_problem, dissipative_system, dt_max, fourier_grid,
    oscillator_problem, white_noise_init,
};
use rfrk::stability::{eval_poly, imaginary_axis_limit, stability_polynomial, StabilityError};
use rfrk::state::{energy, inner, l2_distance, State};
use rfrk::tableau::{builtin_k_vector, builtin_tableau, ButcherTableau, KVector};

const NOISE_SEED: u64 = 42;

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn scheme(name: &str) -> (ButcherTableau, KVector) {
    let t = builtin_tableau(name).unwrap();
    let k = builtin_k_vector(&t).unwrap();
    (t, k)
}

#[test]
fn criterion_01_table1_step_relaxation() {
    let (problem, u0) = dissipative_system();
    let (t, k) = scheme("RK44");
    let mut pass = true;
    let mut details = Vec::new();

    for (dt, expected_eff, expected_change) in [(0.5, 0.44, 12.0), (0.7, 0.42, 40.0)] {
        let recs = integrate(&problem, Method::Relaxation, &t, None, &u0, 0.0, dt, dt, 1).unwrap();
        let eff = recs[0].effective_dt;
        let change = 100.0 * (1.0 - eff / dt);
        pass &= (eff - expected_eff).abs() <= 0.01;
        pass &= (change - expected_change).abs() <= 1.0;
        details.push(format!("R dt={dt}: eff={eff:.4} ({change:.1}%)"));

        let recs = integrate(
            &problem,
            Method::RelaxationFree,
            &t,
            Some(&k),
            &u0,
            0.0,
            dt,
            dt,
            1,
        )
        .unwrap();
        pass &= recs[0].effective_dt == dt;
        details.push(format!("RF dt={dt}: eff={}", recs[0].effective_dt));
    }

    report(1, "table-1 step relaxation", pass, &details.join("; "));
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_02_first_step_monotonicity() {
    let (problem, u0) = dissipative_system();
    let (t, k) = scheme("RK44");
    let e0 = energy(&u0);
    let mut pass = true;
    let mut details = Vec::new();

    for dt in [0.5, 0.7] {
        let classical =
            integrate(&problem, Method::Classical, &t, None, &u0, 0.0, dt, dt, 1).unwrap();
        let relaxed =
            integrate(&problem, Method::Relaxation, &t, None, &u0, 0.0, dt, dt, 1).unwrap();
        let rf = integrate(
            &problem,
            Method::RelaxationFree,
            &t,
            Some(&k),
            &u0,
            0.0,
            dt,
            dt,
            1,
        )
        .unwrap();
        let (ec, er, ef) = (classical[0].energy, relaxed[0].energy, rf[0].energy);
        pass &= ec > e0 && er < e0 && ef < e0;
        details.push(format!(
            "dt={dt}: classical {ec:.6} (up), R {er:.6}, RF {ef:.6}"
        ));
    }

    report(
        2,
        "dissipative first-step monotonicity",
        pass,
        &details.join("; "),
    );
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_03_oscillator_conservation() {
    let problem = oscillator_problem();
    let u0 = State::new(vec![1.0, 0.0]);
    let (t, k) = scheme("RK44");

    let recs = integrate(
        &problem,
        Method::RelaxationFree,
        &t,
        Some(&k),
        &u0,
        0.0,
        0.1,
        100.0,
        1,
    )
    .unwrap();
    let max_drift = recs
        .iter()
        .map(|r| (r.energy - 1.0).abs())
        .fold(0.0f64, f64::max);
    let eps_min = recs
        .iter()
        .map(|r| r.control.epsilon().unwrap())
        .fold(f64::INFINITY, f64::min);
    let eps_max = recs
        .iter()
        .map(|r| r.control.epsilon().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);

    let relaxed = integrate(
        &problem,
        Method::Relaxation,
        &t,
        None,
        &u0,
        0.0,
        0.1,
        100.0,
        1,
    )
    .unwrap();
    let eff_min = relaxed
        .iter()
        .map(|r| r.effective_dt)
        .fold(f64::INFINITY, f64::min);
    let eff_max = relaxed
        .iter()
        .map(|r| r.effective_dt)
        .fold(f64::NEG_INFINITY, f64::max);

    let pass = max_drift <= 1e-10
        && eps_min >= -0.0015
        && eps_max <= 0.0
        && eff_min >= 0.0995
        && eff_max <= 0.1;
    report(
        3,
        "oscillator conservation",
        pass,
        &format!(
            "RF max|E-1|={max_drift:.2e}, eps in [{eps_min:.2e},{eps_max:.2e}], R eff dt in [{eff_min:.6},{eff_max:.6}]"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_oscillator_order_preservation() {
    let problem = oscillator_problem();
    let u0 = State::new(vec![1.0, 0.0]);
    let dts = [0.2, 0.1, 0.05, 0.025, 0.0125];
    let rf_floor = [1.8, 2.8, 3.8, 4.8];
    let mut pass = true;
    let mut details = Vec::new();

    for (i, name) in ["SSPRK22", "SSPRK33", "RK44", "BSRK85"].iter().enumerate() {
        let (t, k) = scheme(name);
        let p = t.order() as f64;

        let classical =
            convergence_study(&problem, Method::Classical, &t, None, &u0, 0.0, &dts, 10.0).unwrap();
        pass &= (classical.slope - p).abs() <= 0.2;

        let rf = convergence_study(
            &problem,
            Method::RelaxationFree,
            &t,
            Some(&k),
            &u0,
            0.0,
            &dts,
            10.0,
        )
        .unwrap();
        pass &= rf.slope >= rf_floor[i];

        details.push(format!(
            "{name}: classical {:.2}, rf {:.2}",
            classical.slope, rf.slope
        ));
    }

    report(
        4,
        "oscillator order preservation",
        pass,
        &details.join("; "),
    );
    assert!(pass, "{details:?}");
}

/// Reference Burgers state at an arbitrary time: BSRK85 classical with a step
/// near 5e-5 chosen to land exactly on the target. Independent of the run
/// under test (different scheme, different step size, classical mode).
fn burgers_reference_at(t_target: f64) -> State {
    let (p, u0) = burgers_problem(50);
    let t = builtin_tableau("BSRK85").unwrap();
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
    .unwrap();
    recs.last().unwrap().state.clone()
}

#[test]
fn criterion_05_burgers_idt_order_drop() {
    let (problem, u0) = burgers_problem(50);
    let (t, k) = scheme("RK44");
    let dx = 2.0 / 50.0;
    let cfls: Vec<f64> = (0..7).map(|j| 0.3 * 0.5f64.powi(j)).collect();
    let mut slopes = Vec::new();

    for method in [Method::Idt, Method::Relaxation, Method::RelaxationFree] {
        let mut points = Vec::new();
        for cfl in &cfls {
            let dt = cfl * dx;
            let steps = (0.2f64 / dt).round().max(1.0);
            let t_end = steps * dt;
            let recs = integrate(
                &problem,
                method,
                &t,
                Some(&k),
                &u0,
                0.0,
                dt,
                t_end,
                usize::MAX,
            )
            .unwrap();
            let last = recs.last().unwrap();
            let err = l2_distance(&last.state, &burgers_reference_at(last.t));
            if err > 1e-12 {
                points.push((dt, err));
            }
        }
        assert!(points.len() >= 2, "{method}: too few usable points");
        slopes.push(rfrk::integrators::fit_log_slope(&points));
    }

    let pass = (slopes[0] - 3.0).abs() <= 0.3 && slopes[1] >= 3.7 && slopes[2] >= 3.7;
    report(
        5,
        "burgers idt order drop",
        pass,
        &format!(
            "idt {:.2} (3+-0.3), r {:.2} (>=3.7), rf {:.2} (>=3.7)",
            slopes[0], slopes[1], slopes[2]
        ),
    );
    assert!(pass, "{slopes:?}");
}

#[test]
fn criterion_06_burgers_conservation() {
    let (problem, u0) = burgers_problem(50);
    let dx = 2.0 / 50.0;
    let dt = 0.3 * dx;
    let steps = (2.0f64 / dt).round();
    let t_end = steps * dt;
    let e0 = energy(&u0);
    let sum0 = u0.component_sum();
    let mut pass = true;
    let mut details = Vec::new();

    for name in ["SSPRK22", "SSPRK33", "RK44", "BSRK85"] {
        let (t, k) = scheme(name);
        // classical: strictly monotone energy drift in one direction
        let recs = integrate(
            &problem,
            Method::Classical,
            &t,
            None,
            &u0,
            0.0,
            dt,
            t_end,
            1,
        )
        .unwrap();
        let mut prev = e0;
        let mut increasing = 0usize;
        let mut decreasing = 0usize;
        for r in &recs {
            if r.energy > prev {
                increasing += 1;
            } else if r.energy < prev {
                decreasing += 1;
            }
            prev = r.energy;
        }
        let monotone = increasing == recs.len() || decreasing == recs.len();
        pass &= monotone;
        let direction = if increasing == recs.len() {
            "up"
        } else {
            "down"
        };
        details.push(format!(
            "{name} classical {direction} drift {:+.2e}",
            recs.last().unwrap().energy - e0
        ));

        // sum invariant for the classical run
        let sum_drift = (recs.last().unwrap().state.component_sum() - sum0).abs();
        pass &= sum_drift <= 1e-12 * sum0.abs();

        // R and RF: drift at roundoff, sum conserved
        for method in [Method::Relaxation, Method::RelaxationFree, Method::Idt] {
            let recs = integrate(&problem, method, &t, Some(&k), &u0, 0.0, dt, t_end, 1).unwrap();
            let drift = recs
                .iter()
                .map(|r| (r.energy - e0).abs())
                .fold(0.0f64, f64::max);
            if method != Method::Idt {
                pass &= drift <= 1e-11 * e0;
            }
            let sdrift = recs
                .iter()
                .map(|r| (r.state.component_sum() - sum0).abs())
                .fold(0.0f64, f64::max);
            pass &= sdrift <= 1e-12 * sum0.abs();
        }
    }

    report(6, "burgers conservation", pass, &details.join("; "));
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_07_advection_spectrum() {
    let grid = fourier_grid(128).unwrap();
    let problem = advection_problem(&grid);
    let u0 = white_noise_init(128, NOISE_SEED);
    let e0 = energy(&u0);
    let (t, k) = scheme("RK44");
    let dt_stable = dt_max(&t, 128).unwrap();
    let mut pass = true;
    let mut details = Vec::new();

    let mut classical_finals = Vec::new();
    for mu in [0.3, 0.6, 0.9] {
        let dt = mu * dt_stable;
        let steps = (1.0f64 / dt).round().max(1.0);
        let t_end = steps * dt;

        let recs = integrate(
            &problem,
            Method::Classical,
            &t,
            None,
            &u0,
            0.0,
            dt,
            t_end,
            1,
        )
        .unwrap();
        classical_finals.push(recs.last().unwrap().energy);

        for method in [Method::Relaxation, Method::RelaxationFree] {
            let recs = integrate(&problem, method, &t, Some(&k), &u0, 0.0, dt, t_end, 1).unwrap();
            let drift = recs
                .iter()
                .map(|r| (r.energy - e0).abs())
                .fold(0.0f64, f64::max);
            pass &= drift <= 1e-10 * e0;
        }
    }
    pass &= classical_finals[0] > classical_finals[1]
        && classical_finals[1] > classical_finals[2]
        && classical_finals[2] < e0;
    details.push(format!(
        "classical E_f/E_0 = {:.3}, {:.3}, {:.3} (mu = 0.3, 0.6, 0.9)",
        classical_finals[0] / e0,
        classical_finals[1] / e0,
        classical_finals[2] / e0
    ));

    // RF at mu = 0.99 completes
    let dt = 0.99 * dt_stable;
    let steps = (1.0f64 / dt).round().max(1.0);
    let rf = integrate(
        &problem,
        Method::RelaxationFree,
        &t,
        Some(&k),
        &u0,
        0.0,
        dt,
        steps * dt,
        1,
    );
    pass &= rf.is_ok();
    details.push(format!("rf mu=0.99 completed: {}", rf.is_ok()));

    report(7, "advection spectrum", pass, &details.join("; "));
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_08_epsilon_scaling() {
    let problem = oscillator_problem();
    let u0 = State::new(vec![1.0, 0.0]);
    let mut pass = true;
    let mut details = Vec::new();

    for name in ["SSPRK22", "SSPRK33", "RK44", "BSRK85"] {
        let (t, k) = scheme(name);
        let p = t.order() as i32;
        let target = 2.0f64.powi(-(p - 1));
        let mut max_eps = Vec::new();
        for level in 0..5 {
            let dt = 0.1 * 0.5f64.powi(level);
            let recs = integrate(
                &problem,
                Method::RelaxationFree,
                &t,
                Some(&k),
                &u0,
                0.0,
                dt,
                10.0,
                1,
            )
            .unwrap();
            max_eps.push(
                recs.iter()
                    .map(|r| r.control.epsilon().unwrap().abs())
                    .fold(0.0f64, f64::max),
            );
        }
        let ratios: Vec<f64> = max_eps.windows(2).map(|w| w[1] / w[0]).collect();
        let ok = ratios
            .iter()
            .all(|r| *r >= 0.75 * target && *r <= 1.25 * target);
        pass &= ok;
        details.push(format!(
            "{name}: ratios {:?} vs target {target:.4}",
            ratios
                .iter()
                .map(|r| (r * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ));
    }

    report(8, "epsilon scaling window", pass, &details.join("; "));
    assert!(
        pass,
        "epsilon contraction ratios outside [0.75, 1.25] x 2^-(p-1): {}",
        details.join("; ")
    );
}

#[test]
fn criterion_09_stability_machinery() {
    let mut pass = true;
    let mut details = Vec::new();

    let rk44 = stability_polynomial(&builtin_tableau("RK44").unwrap());
    let lim = imaginary_axis_limit(&rk44, 1e-9).unwrap();
    pass &= (lim - 2.8284).abs() <= 1e-3;
    details.push(format!("I(RK44)={lim:.5}"));

    let ssprk33 = stability_polynomial(&builtin_tableau("SSPRK33").unwrap());
    let lim = imaginary_axis_limit(&ssprk33, 1e-9).unwrap();
    pass &= (lim - 1.7321).abs() <= 1e-3;
    details.push(format!("I(SSPRK33)={lim:.5}"));

    let ssprk22 = stability_polynomial(&builtin_tableau("SSPRK22").unwrap());
    let none = matches!(
        imaginary_axis_limit(&ssprk22, 1e-9),
        Err(StabilityError::NoStableInterval)
    );
    pass &= none;
    details.push(format!("SSPRK22 no stable interval: {none}"));

    // one classical step on u' = lambda u equals multiplication by R(lambda dt)
    let lambda = -1.37;
    let dt = 0.45;
    let t = builtin_tableau("RK44").unwrap();
    let p = rfrk::problems::Problem::new(1, "scalar", move |_, u: &State| {
        State::new(vec![lambda * u[0]])
    });
    let recs = integrate(
        &p,
        Method::Classical,
        &t,
        None,
        &State::new(vec![1.0]),
        0.0,
        dt,
        dt,
        1,
    )
    .unwrap();
    let predicted = eval_poly(&rk44, Complex64::new(lambda * dt, 0.0)).re;
    let scalar_ok = (recs[0].state[0] - predicted).abs() <= 1e-13 * predicted.abs();
    pass &= scalar_ok;

    let omega = 2.1;
    let rot = rfrk::problems::Problem::new(2, "rotation", move |_, u: &State| {
        State::new(vec![-omega * u[1], omega * u[0]])
    });
    let recs = integrate(
        &rot,
        Method::Classical,
        &t,
        None,
        &State::new(vec![1.0, 0.0]),
        0.0,
        dt,
        dt,
        1,
    )
    .unwrap();
    let predicted = eval_poly(&rk44, Complex64::new(0.0, omega * dt));
    let got = Complex64::new(recs[0].state[0], recs[0].state[1]);
    let rot_ok = (got - predicted).norm() <= 1e-13 * predicted.norm();
    pass &= rot_ok;
    details.push(format!(
        "one-step equivalence: real {scalar_ok}, imaginary {rot_ok}"
    ));

    report(9, "stability machinery", pass, &details.join("; "));
    assert!(pass, "{details:?}");
}

#[test]
fn criterion_10_quadratic_property_suite() {
    let mut rng = StdRng::seed_from_u64(0xEB5);
    let mut pass = true;
    let mut checked_roots = 0usize;
    let mut no_root_signals = 0usize;

    // general sweep: |coefficients| in [1e-6, 1e6], never degenerate
    for _ in 0..10_000 {
        let draw = |rng: &mut StdRng| {
            let mag = 10f64.powf(rng.gen_range(-6.0..6.0));
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        };
        let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let q = QuadraticCoeffs::new(a, b, c);
        let tol = 1e-14 * a.abs().max(b.abs()).max(c.abs());
        match solve_epsilon(&q, tol) {
            Ok(eps) => {
                checked_roots += 1;
                let scale = (a * eps * eps)
                    .abs()
                    .max((b * eps).abs())
                    .max(c.abs())
                    .max(1e-300);
                if q.residual(eps).abs() > 1e-11 * scale {
                    pass = false;
                }
                if q.discriminant < 0.0 {
                    pass = false; // root returned despite negative discriminant
                }
            }
            Err(e) => {
                no_root_signals += 1;
                if e.discriminant >= 0.0 {
                    pass = false; // signal fired with a real root available
                }
            }
        }
    }

    // forced-degenerate sweep: |A*| below threshold falls back to -C*/B*
    let mut degenerate_ok = 0usize;
    for _ in 0..1_000 {
        let b = {
            let mag = 10f64.powf(rng.gen_range(-2.0..2.0));
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        };
        let x = {
            let mag = 10f64.powf(rng.gen_range(-2.0..1.0));
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        };
        let c = -b * x;
        let tol = 1e-13 * b.abs().max(c.abs());
        let a = (rng.gen_range(-0.5..0.5)) * tol;
        let q = QuadraticCoeffs::new(a, b, c);
        match solve_epsilon(&q, tol) {
            Ok(eps) => {
                let linear = -c / b;
                let close = (eps - linear).abs() <= 1e-12 * linear.abs().max(1e-300);
                let scale = (a * eps * eps)
                    .abs()
                    .max((b * eps).abs())
                    .max(c.abs())
                    .max(1e-300);
                if close && q.residual(eps).abs() <= 1e-11 * scale {
                    degenerate_ok += 1;
                } else {
                    pass = false;
                }
            }
            Err(_) => pass = false,
        }
    }

    report(
        10,
        "quadratic solver property suite",
        pass,
        &format!(
            "{checked_roots} roots within residual bound, {no_root_signals} no-root signals all at negative discriminant, {degenerate_ok}/1000 degenerate fallbacks"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_11_energy_identity() {
    let mut rng = StdRng::seed_from_u64(0x1DE);
    let osc = oscillator_problem();
    let (diss, _) = dissipative_system();
    let (burg, burg_u0) = burgers_problem(50);
    let grid = fourier_grid(32).unwrap();
    let adv = advection_problem(&grid);
    let schemes: Vec<ButcherTableau> = ["SSPRK22", "SSPRK33", "RK44", "BSRK85"]
        .iter()
        .map(|n| builtin_tableau(n).unwrap())
        .collect();

    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let t = &schemes[trial % 4];
        let (problem, u, dt): (&rfrk::problems::Problem, State, f64) = match trial % 4 {
            0 => (
                &osc,
                State::new(vec![rng.gen_range(0.3..1.5), rng.gen_range(-1.0..1.0)]),
                10f64.powf(rng.gen_range(-3.0..-0.7)),
            ),
            1 => (
                &diss,
                State::new((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()),
                10f64.powf(rng.gen_range(-3.0..-0.3)),
            ),
            2 => (
                &burg,
                State::new(
                    burg_u0
                        .components()
                        .iter()
                        .map(|v| v + 0.3 * rng.gen_range(-1.0..1.0))
                        .collect(),
                ),
                10f64.powf(rng.gen_range(-4.0..-1.6)),
            ),
            _ => (
                &adv,
                State::new((0..32).map(|_| rng.gen_range(-1.0..1.0)).collect()),
                10f64.powf(rng.gen_range(-4.0..-1.6)),
            ),
        };
        let sd = compute_stages(t, |tt, uu| problem.rhs(tt, uu), 0.0, &u, dt).unwrap();
        let drift = energy_drift(t, &sd, dt);
        let physical: f64 = 2.0
            * dt
            * t.b()
                .iter()
                .zip(&sd.uf_terms)
                .map(|(bj, uf)| bj * uf)
                .sum::<f64>();
        let after = rfrk::integrators::classical_step(t, &sd, &u, 0.0, dt).unwrap();
        let direct = after.energy - energy(&u);
        let rel = (direct - (physical + drift)).abs() / energy(&u).max(after.energy);
        worst = worst.max(rel);
    }

    let pass = worst <= 1e-12;
    report(
        11,
        "per-step energy identity",
        pass,
        &format!("worst relative residual {worst:.2e} over 100 random steps"),
    );
    assert!(pass);
}

// keep inner/uf diagnostics honest: the identity test above relies on
// <y_j, f_j> being reported per stage
#[test]
fn stage_uf_terms_match_direct_inner_products() {
    let (p, u0) = burgers_problem(50);
    let t = builtin_tableau("SSPRK33").unwrap();
    let sd = compute_stages(&t, |tt, uu| p.rhs(tt, uu), 0.0, &u0, 0.01).unwrap();
    for j in 0..3 {
        assert_eq!(sd.uf_terms[j], inner(&sd.y[j], &sd.f[j]));
    }
}
