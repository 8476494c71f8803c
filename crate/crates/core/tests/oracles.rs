use num_rational::Ratio;
use permubench_core::oracles::{
    ea_hitting_time_exact, mutation_kernel_exact, same_cycle_probability_brute, same_cycle_probability_exact,
    CycleType, DEFAULT_TAIL_BOUND,
};
use permubench_core::{
    compose, run_batch, BatchOptions, BenchmarkSpec, MutationConfig, Mutator, Permutation, RandomStream, StartPolicy,
};

#[test]
fn same_cycle_probability_matches_enumeration() {
    for n in 2..=7 {
        for p in Permutation::all(n) {
            let exact = same_cycle_probability_exact(&CycleType::of(&p)).unwrap();
            assert_eq!(exact.exact, same_cycle_probability_brute(&p).unwrap(), "{p}");
        }
    }
    for n in 2..=10 {
        for ct in CycleType::all(n) {
            let s = same_cycle_probability_exact(&ct).unwrap();
            assert!(s.exact <= s.bound, "{ct}");
        }
    }
    let ct = CycleType::new(vec![2, 3], 0).unwrap();
    let s = same_cycle_probability_exact(&ct).unwrap();
    assert_eq!(s.exact, Ratio::new(2, 5));
    assert_eq!(s.bound, Ratio::new(3, 5));
}

#[test]
fn swap_kernel_stay_probability_matches_sampling() {
    let cfg = MutationConfig::swap();
    let kernel = mutation_kernel_exact(4, &cfg, DEFAULT_TAIL_BOUND).unwrap();
    let sigma: Permutation = "2,4,3,1".parse().unwrap();
    let s = sigma.lex_rank();
    let exact = kernel.prob(s, s);
    let mut m = Mutator::new(cfg);
    let mut rng = RandomStream::new(99);
    let draws = 10_000_000u64;
    let mut word = sigma.as_zero_based().to_vec();
    let mut undo = Vec::new();
    let mut stay = 0u64;
    for _ in 0..draws {
        m.mutate_word(&mut word, &mut rng, &mut undo);
        stay += u64::from(word == sigma.as_zero_based());
        while let Some((pos, v)) = undo.pop() {
            word[pos as usize] = v;
        }
    }
    let p = stay as f64 / draws as f64;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    assert!((p - exact).abs() <= 4.0 * se, "{p} vs {exact}");
}

#[test]
fn swap_kernel_depends_on_cycle_type_of_the_step() {
    let kernel = mutation_kernel_exact(5, &MutationConfig::swap(), DEFAULT_TAIL_BOUND).unwrap();
    let mut by_type = std::collections::HashMap::new();
    for (i, a) in kernel.states.iter().enumerate() {
        for (j, b) in kernel.states.iter().enumerate() {
            let step = compose(b, &a.inverse()).unwrap();
            let v = kernel.prob(i, j);
            let first = *by_type.entry(CycleType::of(&step)).or_insert(v);
            assert!((first - v).abs() < 1e-15);
        }
    }
}

#[test]
fn leading_ones_hitting_time_matches_engine() {
    for n in 3..=5 {
        let spec = BenchmarkSpec::p_leading_ones(n).unwrap();
        let cfg = MutationConfig::swap();
        let exact = ea_hitting_time_exact(&spec, &cfg, &StartPolicy::UniformRandom).unwrap();
        let batch = run_batch(
            &spec,
            &cfg,
            &BatchOptions {
                budget: 1_000_000,
                run_count: 10_000,
                master_seed: 40 + n as u64,
                start: StartPolicy::UniformRandom,
                threads: None,
                record_trajectory: false,
            },
        )
        .unwrap();
        assert_eq!(batch.success_rate, 1.0);
        let (mean, se) = (batch.mean_iterations.unwrap(), batch.standard_error.unwrap());
        assert!(exact.expected.is_finite());
        assert!((mean - exact.expected).abs() <= 3.0 * se, "n={n}: {mean} ± {se} vs {}", exact.expected);
    }
}

#[test]
fn scramble_hitting_time_matches_engine() {
    let spec = BenchmarkSpec::p_jump(5, 3).unwrap();
    let cfg = MutationConfig::scramble();
    let exact = ea_hitting_time_exact(&spec, &cfg, &StartPolicy::UniformA2Plus).unwrap();
    let batch = run_batch(
        &spec,
        &cfg,
        &BatchOptions {
            budget: 10_000_000,
            run_count: 10_000,
            master_seed: 5,
            start: StartPolicy::UniformA2Plus,
            threads: None,
            record_trajectory: false,
        },
    )
    .unwrap();
    let (mean, se) = (batch.mean_iterations.unwrap(), batch.standard_error.unwrap());
    assert!((mean - exact.expected).abs() <= 3.0 * se, "{mean} ± {se} vs {}", exact.expected);
}
