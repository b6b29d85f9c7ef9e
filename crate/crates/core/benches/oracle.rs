use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use planar_fto::failure::FailureOracle;
use planar_fto::frdijkstra::Strategy;
use planar_fto::graph::generate::{grid, WeightMode};
use planar_fto::par;
use planar_fto::workload::failure_queries;

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("failure_build");
    group.sample_size(10);
    for side in [32usize, 64] {
        let g = grid(
            side,
            side,
            WeightMode::SeededRandom {
                max_weight: 100,
                seed: 1,
            },
        )
        .unwrap();
        let n = side * side;
        group.bench_with_input(BenchmarkId::new("sequential", n), &g, |b, g| {
            b.iter(|| par::with_threads(1, || FailureOracle::build(black_box(g.clone())).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &g, |b, g| {
            b.iter(|| FailureOracle::build(black_box(g.clone())).unwrap())
        });
    }
    group.finish();
}

fn query(c: &mut Criterion) {
    let g = grid(
        64,
        64,
        WeightMode::SeededRandom {
            max_weight: 100,
            seed: 2,
        },
    )
    .unwrap();
    let o = FailureOracle::build(g).unwrap();
    let qs = failure_queries(&mut ChaCha8Rng::seed_from_u64(3), 4096, 64, 3);
    let mut group = c.benchmark_group("failure_query");
    for strategy in [Strategy::Naive, Strategy::Monge] {
        if !strategy.available() {
            continue;
        }
        group.bench_function(format!("{strategy:?}").to_lowercase(), |b| {
            b.iter(|| {
                for q in &qs {
                    black_box(
                        o.query_with(q.u, q.v, &q.failed, strategy)
                            .unwrap()
                            .distance,
                    );
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, build, query);
criterion_main!(benches);
