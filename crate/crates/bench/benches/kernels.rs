use std::hint::black_box;

use colltherm::{
    build_chain_state, hermitian_eig, qfi_chain, AncillaPrep, ChainConfig, ComplexMatrix,
    ModelParams, C64,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(n: usize) -> ChainConfig {
    let params = ModelParams::new(2.0, 0.1, std::f64::consts::PI / 100.0, AncillaPrep::Plus)
        .expect("valid parameters");
    ChainConfig::new(params, n)
}

fn chain_state(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_chain_state");
    group.sample_size(10);
    for n in [2, 4, 6, 8, 10] {
        let cfg = config(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| build_chain_state(black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn chain_qfi(c: &mut Criterion) {
    let mut group = c.benchmark_group("qfi_chain");
    group.sample_size(10);
    for n in [1, 4, 6, 8] {
        let cfg = config(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| qfi_chain(black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn eig(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermitian_eig");
    group.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dim in [16, 64, 256, 1024] {
        let a = ComplexMatrix::from_fn(dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = a.hermitian_part();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &h, |b, h| {
            b.iter(|| hermitian_eig(black_box(h)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, chain_state, chain_qfi, eig);
criterion_main!(benches);
