use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use depscreen::local_regression::{build_design, lars_positive_path_normal, nnls_normal, LocalMeasure};
use depscreen::rng::stream;
use depscreen::{DataColumn, Dataset};
use rand::Rng;

fn dataset(n: usize, d: usize) -> Dataset {
    let mut rng = stream(3, &[n as u64, d as u64]);
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let y: Vec<f64> = (0..n).map(|i| cols[0][i] + cols[1][i] * cols[1][i]).collect();
    Dataset::new(
        cols.iter().map(|c| DataColumn::from_scalars(c).unwrap()).collect(),
        DataColumn::from_scalars(&y).unwrap(),
    )
    .unwrap()
}

fn solvers(c: &mut Criterion) {
    let mut g = c.benchmark_group("local_regression");
    for (n, d) in [(50, 10), (100, 10), (200, 20)] {
        let ds = dataset(n, d);
        let label = format!("n{n}_d{d}");
        g.bench_function(BenchmarkId::new("design", &label), |b| {
            b.iter(|| build_design(black_box(&ds), LocalMeasure::Hsic).unwrap())
        });
        let eq = build_design(&ds, LocalMeasure::Hsic).unwrap().normal_equations();
        g.bench_function(BenchmarkId::new("nnls", &label), |b| {
            b.iter(|| nnls_normal(black_box(&eq)).unwrap())
        });
        g.bench_function(BenchmarkId::new("lars", &label), |b| {
            b.iter(|| lars_positive_path_normal(black_box(&eq)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
