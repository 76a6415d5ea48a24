use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use spherecone::exact::{canonical_flag, is_parabolically_stable, normalize_flag, weights_from_angles};
use spherecone::fuchsian::monodromy_generators;
use spherecone::metric::PathChoice;
use spherecone::unitarize::{solve_unitarizing_parameters, unitarity_defect};
use spherecone::{DevelopingMap, SolverConfig, TransportOptions};
use spherecone_bench::{exact_config, n3_data, square, square_angles};

fn exact(c: &mut Criterion) {
    let config = exact_config();
    let weights = weights_from_angles(config.angles()).unwrap();
    let flag = canonical_flag(&config);
    c.bench_function("stability n=7", |b| {
        b.iter(|| is_parabolically_stable(black_box(&flag), &weights, &config).unwrap())
    });
    c.bench_function("normalize flag n=7", |b| b.iter(|| normalize_flag(black_box(&flag), &config).unwrap()));
}

fn monodromy(c: &mut Criterion) {
    let data = n3_data();
    let opts = TransportOptions::default();
    c.bench_function("monodromy n=3", |b| b.iter(|| monodromy_generators(black_box(&data), None, &opts).unwrap()));
    let cfg = SolverConfig::default();
    c.bench_function("unitarity defect n=3", |b| b.iter(|| unitarity_defect(black_box(&data), &cfg).unwrap()));
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    let (poles, angles) = (square(), square_angles());
    let cfg = SolverConfig::default();
    group.bench_function("n=4 square", |b| {
        b.iter(|| solve_unitarizing_parameters(black_box(&poles), &angles, &cfg).unwrap())
    });
    group.finish();
}

fn metric(c: &mut Criterion) {
    let data = n3_data();
    let cfg = SolverConfig::default();
    let (cert, rep) = unitarity_defect(&data, &cfg).unwrap();
    let map = DevelopingMap::new(data, &cert, &rep, cfg.transport).unwrap();
    let z = Complex64::new(0.4, 0.7);
    c.bench_function("lambda sample n=3", |b| b.iter(|| map.sample(black_box(z), PathChoice::Default).unwrap()));
}

criterion_group!(benches, exact, monodromy, solve, metric);
criterion_main!(benches);
