use criterion::{criterion_group, criterion_main, Criterion};
use permubench_core::oracles::{ea_hitting_time_exact, mutation_kernel_exact, transposition_kernel};
use permubench_core::{BenchmarkSpec, MutationConfig, StartPolicy};

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracles");
    group.sample_size(10);
    group.bench_function("transposition_kernel_6", |b| b.iter(|| transposition_kernel(6).unwrap()));
    group.bench_function("swap_kernel_6", |b| {
        b.iter(|| mutation_kernel_exact(6, &MutationConfig::swap(), 1e-12).unwrap())
    });
    group.bench_function("hitting_time_pjump_6_3", |b| {
        let spec = BenchmarkSpec::p_jump(6, 3).unwrap();
        b.iter(|| ea_hitting_time_exact(&spec, &MutationConfig::swap(), &StartPolicy::UniformA2Plus).unwrap())
    });
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
