//! Batch search over random positions: rayon vs a plain loop.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mcms::domains::{Ewn, Pig};
use mcms::harness::random_position;
use mcms::parallel::{map_parallel, map_sequential};
use mcms::search::{Budget, Engine, StarConfig, StarEngine, StarVariant};

fn search_value<G: mcms::Game>(game: &G, s: &G::State) -> f64 {
    let cfg = StarConfig::new(StarVariant::Star2).with_budget(Budget::Nodes(2000), 64);
    StarEngine::new(StarConfig { tt_bits: 12, ..cfg }).search(game, s, 1).value
}

fn batch(c: &mut Criterion) {
    let pig: Vec<_> = (0..64).map(|i| random_position(&Pig, i)).collect();
    let ewn: Vec<_> = (0..64).map(|i| random_position(&Ewn, i)).collect();
    let mut g = c.benchmark_group("batch_search");
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("sequential", "pig"), |b| b.iter(|| map_sequential(&pig, |s| search_value(&Pig, s))));
    g.bench_function(BenchmarkId::new("parallel", "pig"), |b| b.iter(|| map_parallel(&pig, |s| search_value(&Pig, s))));
    g.bench_function(BenchmarkId::new("sequential", "ewn"), |b| b.iter(|| map_sequential(&ewn, |s| search_value(&Ewn, s))));
    g.bench_function(BenchmarkId::new("parallel", "ewn"), |b| b.iter(|| map_parallel(&ewn, |s| search_value(&Ewn, s))));
    g.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
