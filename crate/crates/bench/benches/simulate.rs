use criterion::{black_box, criterion_group, criterion_main, Criterion};
use piestab_bench::fixture;
use piestab_core::simulate::{integrate, semidiscretize};

fn simulation(c: &mut Criterion) {
    let sys = fixture("reaction_diffusion_dirichlet");
    c.bench_function("semidiscretize/64", |bench| bench.iter(|| semidiscretize(black_box(&sys), 64).unwrap()));
    let d = semidiscretize(&sys, 64).unwrap();
    let x0 = d.initial_state(&[1.0; 4], |_| vec![1.0]).unwrap();
    let mut group = c.benchmark_group("integrate");
    group.sample_size(10);
    group.bench_function("64/1000 steps", |bench| bench.iter(|| integrate(&d, black_box(&x0), 1.0, 1e-3).unwrap()));
    group.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
