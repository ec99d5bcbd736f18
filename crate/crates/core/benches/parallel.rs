//! Sequential vs rayon execution for the hot kernels of a desk-size run.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use strata_core::sim::{SimConfig, Solver};
use strata_core::weights::{ln_norm_weighted, NormSpec};
use strata_core::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn solvers() -> Vec<(&'static str, Solver)> {
    POLICIES
        .iter()
        .map(|&(name, ex)| (name, Solver::new(SimConfig::default(), ex).unwrap()))
        .collect()
}

fn kernels(c: &mut Criterion) {
    let solvers = solvers();
    let state = solvers[0].1.init_field().unwrap();

    let mut g = c.benchmark_group("fft_inverse_32x128x32");
    for (name, s) in &solvers {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            let mut buf = state.theta.coeffs.clone();
            b.iter(|| s.fft().inverse(black_box(&mut buf), s.exec()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("nonlinear_rhs");
    g.sample_size(20);
    for (name, s) in &solvers {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| s.nonlinear_rhs(black_box(12.0), &state.theta))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("weighted_norm");
    for (name, s) in &solvers {
        let spec = NormSpec {
            sigma: s.config().weights.sigma[0],
            lambda: 0.12,
            t: 12.0,
            use_j: true,
            use_b: false,
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ln_norm_weighted(&state.theta, s.bank(), &spec, |_, _| 0.0, s.exec()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("step_nonlinear");
    g.sample_size(10);
    for (name, s) in &solvers {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                || state.clone(),
                |mut st| s.step_nonlinear(&mut st, 0.05).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
