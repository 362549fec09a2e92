use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use jointloop::harness::fixtures::{published_frames, PUBLISHED_DISTANCES};
use jointloop::harness::{simulate, NoiseModel};
use jointloop::{assemble, coefficient_row, solve, LoopShape, SolveOptions};

fn coefficients(c: &mut Criterion) {
    let obs = PUBLISHED_DISTANCES[0].map(|d| d * d);
    c.bench_function("coefficient_row", |b| {
        b.iter(|| coefficient_row(black_box(obs)))
    });
}

fn assemble_and_solve(c: &mut Criterion) {
    let shape = LoopShape::from_lengths(&[2.0, 3.0, 4.0, 1.0]).unwrap();
    let mut group = c.benchmark_group("assemble_solve");
    group.bench_function("published_19", |b| {
        let frames = published_frames();
        b.iter(|| {
            solve(
                &assemble(black_box(&frames)).unwrap(),
                &SolveOptions::default(),
            )
        })
    });
    for n in [30, 100, 1000] {
        let frames = simulate(&shape, n, &NoiseModel::none(), 1).unwrap().frames;
        group.bench_with_input(BenchmarkId::from_parameter(n), &frames, |b, f| {
            b.iter(|| solve(&assemble(black_box(f)).unwrap(), &SolveOptions::default()))
        });
    }
    group.finish();
}

fn simulation(c: &mut Criterion) {
    let shape = LoopShape::from_lengths(&[2.0, 3.0, 4.0, 1.0]).unwrap();
    let noise = NoiseModel::round_sig(3);
    c.bench_function("simulate_19", |b| {
        b.iter(|| simulate(&shape, 19, &noise, black_box(7)).unwrap())
    });
}

criterion_group!(benches, coefficients, assemble_and_solve, simulation);
criterion_main!(benches);
