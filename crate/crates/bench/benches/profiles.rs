use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use translator_bench::{positive_points, speeds};
use translator_core::picard::picard_solve;
use translator_core::profiles::{integrate_profile, ProfileOptions};
use translator_core::speeds::{eval_derivatives, eval_speed};
use translator_core::SpeedSpec;

fn speed_evaluation(c: &mut Criterion) {
    let n = 5;
    let points = positive_points(n, 64, 9);
    let mut group = c.benchmark_group("speed");
    for (label, spec) in speeds(n) {
        group.bench_function(format!("value/{label}"), |b| {
            b.iter(|| points.iter().map(|p| eval_speed(&spec, black_box(p)).unwrap()).sum::<f64>())
        });
        group.bench_function(format!("derivatives/{label}"), |b| {
            b.iter(|| points.iter().map(|p| eval_derivatives(&spec, black_box(p)).unwrap().value).sum::<f64>())
        });
    }
    group.finish();
}

fn profile_integration(c: &mut Criterion) {
    let mut group = c.benchmark_group("profile");
    group.sample_size(20);
    let cases = [
        ("sigma2-n2", SpeedSpec::sigma_k_root(2, 2).unwrap()),
        ("sigma2-n3", SpeedSpec::sigma_k_root(2, 3).unwrap()),
        ("harmonic-n3", SpeedSpec::harmonic_pairs(3).unwrap()),
    ];
    for (label, spec) in cases {
        group.bench_function(label, |b| {
            b.iter(|| integrate_profile(black_box(&spec), &ProfileOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn picard_iteration(c: &mut Criterion) {
    let mut group = c.benchmark_group("picard");
    group.sample_size(10);
    group.bench_function("n3-m512", |b| b.iter(|| picard_solve(3, 0.3, black_box(512), 1e-12, 5000).unwrap()));
    group.finish();
}

criterion_group!(benches, speed_evaluation, profile_integration, picard_iteration);
criterion_main!(benches);
