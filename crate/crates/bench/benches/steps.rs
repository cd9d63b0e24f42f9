//! Per-step cost of the four update rules. The energy-controlling variants
//! should add only the Gram-matrix inner products on top of a classical step.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rfrk::integrators::{classical_step, compute_stages, idt_step, rfrk_step, rrk_step};
use rfrk_bench::{fixtures, rk44};

fn bench_steps(c: &mut Criterion) {
    let (tableau, k) = rk44();
    for fx in fixtures() {
        let mut group = c.benchmark_group(format!("step/{}", fx.label));
        let stages = compute_stages(&tableau, |t, u| fx.problem.rhs(t, u), 0.0, &fx.u0, fx.dt)
            .expect("stage evaluation");

        group.bench_function("stages", |b| {
            b.iter(|| {
                compute_stages(
                    &tableau,
                    |t, u| fx.problem.rhs(t, u),
                    0.0,
                    black_box(&fx.u0),
                    fx.dt,
                )
                .unwrap()
            })
        });
        group.bench_function("classical", |b| {
            b.iter(|| classical_step(&tableau, black_box(&stages), &fx.u0, 0.0, fx.dt).unwrap())
        });
        group.bench_function("idt", |b| {
            b.iter(|| idt_step(&tableau, black_box(&stages), &fx.u0, 0.0, fx.dt).unwrap())
        });
        group.bench_function("r", |b| {
            b.iter(|| rrk_step(&tableau, black_box(&stages), &fx.u0, 0.0, fx.dt).unwrap())
        });
        group.bench_function("rf", |b| {
            b.iter(|| rfrk_step(&tableau, &k, black_box(&stages), &fx.u0, 0.0, fx.dt).unwrap())
        });
        group.finish();
    }
}

criterion_group!(benches, bench_steps);
criterion_main!(benches);
