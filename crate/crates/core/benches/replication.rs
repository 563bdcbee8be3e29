//! Parallel vs sequential replication, and the interval index vs the naive
//! sweep inside follow-the-best-price.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trade_lab::harness::{replicate_with, AlgoSpec, EnvSpec, ExperimentConfig};
use trade_lab::parallel::Execution;
use trade_lab::strategy::{Fbp, IndexMode};
use trade_lab::{FeedbackKind, ValuationPair};

fn config(reps: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: "bench".into(),
        env: EnvSpec::UniformIid,
        algo: AlgoSpec::Fbp { naive_index: false },
        feedback: FeedbackKind::Full,
        horizons: vec![4096],
        replications: reps,
        master_seed: 1,
        checkpoints: Some(vec![]),
        horizon_known: true,
    }
}

fn replication(c: &mut Criterion) {
    let mut group = c.benchmark_group("replication");
    group.sample_size(10);
    for reps in [8usize, 32] {
        let cfg = config(reps);
        group.bench_with_input(BenchmarkId::new("sequential", reps), &cfg, |b, cfg| {
            b.iter(|| black_box(replicate_with(cfg, Execution::Sequential).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("parallel", reps), &cfg, |b, cfg| {
            b.iter(|| black_box(replicate_with(cfg, Execution::Parallel).unwrap()))
        });
    }
    group.finish();
}

fn fbp_index(c: &mut Criterion) {
    let mut group = c.benchmark_group("fbp_index");
    group.sample_size(10);
    for horizon in [1_000usize, 4_000] {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pairs: Vec<ValuationPair> = (0..horizon)
            .map(|_| {
                let (x, y): (f64, f64) = (rng.gen(), rng.gen());
                ValuationPair { s: x.min(y), b: x.max(y) }
            })
            .collect();
        for (name, mode) in [("tree", IndexMode::Tree), ("naive", IndexMode::Naive)] {
            group.bench_with_input(BenchmarkId::new(name, horizon), &pairs, |b, pairs| {
                b.iter(|| {
                    let mut fbp = Fbp::with_mode(mode);
                    for &v in pairs {
                        fbp.push(v);
                    }
                    black_box(fbp.current_price())
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, replication, fbp_index);
criterion_main!(benches);
