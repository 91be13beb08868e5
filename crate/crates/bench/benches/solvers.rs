use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use csflab_bench::{markov, rayleigh_20db, rayleigh_correlated, two_state};
use csflab_core::mathkit::tail_log_integral;
use csflab_core::rayleigh::{ar1_transition, group_optimize, lsc_threshold_rate, vq_optimize, waterfilling_reference};
use csflab_core::simkit::simulate_fixed;
use csflab_core::twostate::{markov_vq_bounds, vq_forward_rate};

fn twostate(c: &mut Criterion) {
    let params = two_state();
    c.bench_function("vq_forward_rate", |b| b.iter(|| vq_forward_rate(&params, black_box(0.3))));
    let src = markov();
    c.bench_function("markov_vq_bounds", |b| b.iter(|| markov_vq_bounds(&src, 0.3, 3.0, 0.0, black_box(0.3))));
}

fn rayleigh(c: &mut Criterion) {
    c.bench_function("tail_log_integral", |b| b.iter(|| tail_log_integral(black_box(1.2), black_box(0.7))));
    let sys = rayleigh_20db();
    c.bench_function("vq_optimize", |b| b.iter(|| vq_optimize(&sys, black_box(0.4))));
    c.bench_function("lsc_threshold_rate", |b| b.iter(|| lsc_threshold_rate(&sys, black_box(200.0))));
    c.bench_function("group_optimize", |b| b.iter(|| group_optimize(&sys, black_box(200.0))));
    let corr = rayleigh_correlated();
    c.bench_function("ar1_transition", |b| b.iter(|| ar1_transition(corr.alpha, black_box(1.2))));

    let mut slow = c.benchmark_group("monte_carlo");
    slow.sample_size(10);
    slow.bench_function("waterfilling_10k", |b| b.iter(|| waterfilling_reference(&sys, 10_000, black_box(1))));
    let params = two_state();
    slow.bench_function("simulate_fixed_n16_m256", |b| b.iter(|| simulate_fixed(&params, 16, 256, 10_000, black_box(1))));
    slow.finish();
}

criterion_group!(benches, twostate, rayleigh);
criterion_main!(benches);
