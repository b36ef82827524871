//! Parallel vs sequential sweep throughput on realistic grid workloads.

use criterion::{criterion_group, criterion_main, Criterion};

use optosqueeze::exec::{map_ordered, map_ordered_seq};
use optosqueeze::gaussian::{build_quadrature_system, position_variance, solve_lyapunov};
use optosqueeze::steadystate::LinearizedModel;

/// One squeezing-map grid row: stability-gated Lyapunov solve.
fn grid_cell(delta_a: f64, lambda: f64) -> f64 {
    let lin = LinearizedModel::from_coefficients(delta_a, lambda, 0.05, 0.1, 1e-6, 0.0);
    let sys = build_quadrature_system(&lin);
    match solve_lyapunov(&sys) {
        Ok(cov) => position_variance(&cov),
        Err(_) => f64::NAN,
    }
}

fn grid_points(n: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let delta_a = 0.5 + 3.5 * i as f64 / (n - 1) as f64;
            let lambda = 0.02 + 2.0 * j as f64 / (n - 1) as f64;
            pts.push((delta_a, lambda));
        }
    }
    pts
}

fn bench_squeezing_grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("squeezing_grid_48x48");
    group.sample_size(10);
    let pts = grid_points(48);
    group.bench_function("parallel", |b| {
        b.iter(|| map_ordered(pts.clone(), |(d, l)| grid_cell(d, l)))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| map_ordered_seq(pts.clone(), |(d, l)| grid_cell(d, l)))
    });
    group.finish();
}

fn bench_fixed_point_sweep(c: &mut Criterion) {
    use optosqueeze::model::{reference_si_input, to_internal, DetuningMode};
    use optosqueeze::pipeline::solve_point;

    let mut group = c.benchmark_group("power_sweep_64");
    group.sample_size(10);
    let powers: Vec<f64> = (1..=64).map(|k| 2.0e-6 * k as f64).collect();
    let run = |p: f64| {
        let params = to_internal(&reference_si_input(p, false)).unwrap();
        solve_point(&params, DetuningMode::Optimal)
            .map(|pt| pt.variance_x.unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN)
    };
    group.bench_function("parallel", |b| b.iter(|| map_ordered(powers.clone(), run)));
    group.bench_function("sequential", |b| {
        b.iter(|| map_ordered_seq(powers.clone(), run))
    });
    group.finish();
}

criterion_group!(benches, bench_squeezing_grid, bench_fixed_point_sweep);
criterion_main!(benches);
