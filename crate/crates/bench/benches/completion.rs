use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use hankel_bench::{hilbert, restrict, spread_moments};
use hankel_core::linalg::partial_definiteness;
use hankel_core::measure::{complete_arithmetic_pattern, extract_measure};
use hankel_core::schur::complete_pattern_inductive;
use hankel_core::{classify, decide, OracleOptions, PartialSequence, Pattern, ToleranceOptions};

fn lina(c: &mut Criterion) {
    let tol = ToleranceOptions::default();
    let s = PartialSequence::from_values(&hilbert(21)).unwrap();
    c.bench_function("partial_definiteness/hilbert_h10", |b| {
        b.iter(|| partial_definiteness(black_box(&s), &tol).unwrap())
    });
    let gappy = restrict(&spread_moments(12, 20), &[0, 1, 2, 5, 8, 9, 13, 16, 20], 20);
    c.bench_function("partial_definiteness/gappy_h10", |b| {
        b.iter(|| partial_definiteness(black_box(&gappy), &tol).unwrap())
    });
}

fn schur(c: &mut Criterion) {
    let tol = ToleranceOptions::default();
    let m = spread_moments(12, 21);
    let odd = restrict(&m, &[1, 3, 5, 7, 9], 9);
    c.bench_function("schur/odd_subset_to_21", |b| {
        b.iter(|| complete_pattern_inductive(black_box(&odd), 21, &tol).unwrap())
    });
    let prefix = restrict(&m, &[0, 1, 2, 3, 4, 5, 6], 6);
    c.bench_function("schur/prefix_to_21", |b| {
        b.iter(|| complete_pattern_inductive(black_box(&prefix), 21, &tol).unwrap())
    });
}

fn measure(c: &mut Criterion) {
    let tol = ToleranceOptions::default();
    let t = spread_moments(6, 11);
    c.bench_function("measure/extract_6_atoms", |b| {
        b.iter(|| extract_measure(black_box(&t), &tol).unwrap())
    });
    let evens: Vec<usize> = (0..=10).map(|k| 2 * k).collect();
    let s = restrict(&hilbert(21), &evens, 20);
    c.bench_function("measure/even_hilbert_to_20", |b| {
        b.iter(|| complete_arithmetic_pattern(black_box(&s), 2, 0, 20, &tol).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let tol = ToleranceOptions::default();
    let opts = OracleOptions {
        budget: 2_000,
        ..OracleOptions::default()
    };
    let infeasible = restrict(&[1.0, 0.5, 0.0, 0.0, 1.0 / 16.0], &[0, 1, 4], 4);
    c.bench_function("oracle/obstruction_014", |b| {
        b.iter(|| decide(black_box(&infeasible), 2, &opts).unwrap())
    });
    let feasible = restrict(&spread_moments(5, 8), &[0, 3, 8], 8);
    c.bench_function("oracle/search_038", |b| {
        b.iter(|| decide(black_box(&feasible), 4, &opts).unwrap())
    });
    let p: Pattern = "0,1,3,4".parse().unwrap();
    c.bench_function("classify/0134", |b| b.iter(|| classify(black_box(&p), 4, &tol).unwrap()));
}

criterion_group!(benches, lina, schur, measure, oracle);
criterion_main!(benches);
