use std::hint::black_box;

use coherence_bench::reachable_pairs;
use coherence_core::conversion::synthesize_optimal;
use coherence_core::oracle::OracleCloud;
use coherence_core::{
    bloch_to_density, max_conversion_probability, simulate_counts, simulate_sio_circuit, tomography_reconstruct,
    BlochVector, OracleConfig, PauliBasis,
};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn closed_form(c: &mut Criterion) {
    let pairs = reachable_pairs(1024, 1);
    c.bench_function("max_probability_1024", |b| {
        b.iter(|| pairs.iter().map(|(r, s)| max_conversion_probability(black_box(r), black_box(s))).sum::<f64>())
    });
    c.bench_function("synthesize_optimal_1024", |b| {
        b.iter(|| {
            for (r, s) in &pairs {
                black_box(synthesize_optimal(r, s).unwrap());
            }
        })
    });
}

fn oracle(c: &mut Criterion) {
    let rho = BlochVector::new_unchecked(0.5, 0.0, 1.0 / 3.0);
    let cfg = OracleConfig { grid_resolution: 32, random_samples: 10_000, seed: 0, target_tolerance: 1e-3 };
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("build_32", |b| b.iter(|| OracleCloud::build(black_box(&rho), &cfg).unwrap()));
    let cloud = OracleCloud::build(&rho, &cfg).unwrap();
    let sigma = BlochVector::new_unchecked(0.6, 0.0, 0.2);
    group.bench_function("query", |b| b.iter(|| cloud.max_probability(black_box(&sigma), 1e-3)));
    group.finish();
}

fn photonic(c: &mut Criterion) {
    let rho = bloch_to_density(BlochVector::new_unchecked(11f64.sqrt() / 6.0, 0.0, 5.0 / 6.0)).unwrap();
    c.bench_function("circuit", |b| b.iter(|| simulate_sio_circuit(black_box(72.45), 0.0, &rho).unwrap()));
    let (last, _) = simulate_sio_circuit(72.45, 0.0, &rho).unwrap();
    let branches: Vec<_> = (0..2)
        .map(|k| {
            let block = last.path_block(k);
            (block.trace().re, coherence_core::DensityOperator::from_unnormalized(block).unwrap())
        })
        .collect();
    c.bench_function("tomography_1e6", |b| {
        b.iter_batched(
            || 0u64,
            |seed| {
                let recs: Vec<_> = PauliBasis::ALL
                    .iter()
                    .map(|basis| simulate_counts(&branches, *basis, 1_000_000, seed).unwrap())
                    .collect();
                tomography_reconstruct(&recs).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, closed_form, oracle, photonic);
criterion_main!(benches);
