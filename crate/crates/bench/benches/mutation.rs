use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use permubench_core::{MutationConfig, Mutator, Permutation, RandomStream};

fn mutate(c: &mut Criterion) {
    let mut group = c.benchmark_group("mutate_word");
    for n in [16usize, 256, 4096] {
        for (name, cfg) in [("swap", MutationConfig::swap()), ("scramble", MutationConfig::scramble())] {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                let mut rng = RandomStream::new(1);
                let mut word = permubench_core::random_permutation_uniform(n, &mut rng).unwrap().into_zero_based();
                let mut mutator = Mutator::new(cfg.clone());
                let mut undo = Vec::new();
                b.iter(|| {
                    let k = mutator.mutate_word(black_box(&mut word), &mut rng, &mut undo);
                    undo.clear();
                    k
                });
            });
        }
    }
    group.finish();

    c.bench_function("heavy_tailed_scramble_256", |b| {
        let cfg = MutationConfig::heavy_tailed_scramble(1.5, 256).unwrap();
        let sigma = Permutation::identity(256);
        let mut rng = RandomStream::new(2);
        b.iter(|| permubench_core::mutate(black_box(&sigma), &cfg, &mut rng));
    });
}

criterion_group!(benches, mutate);
criterion_main!(benches);
