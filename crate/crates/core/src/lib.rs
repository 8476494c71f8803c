//! Permutation-based (1+1) EA with swap and scramble mutation, the lifted
//! benchmarks PHam, PLeadingOnes and PJump, and exact oracles for small `n`.
//!
//! ```
//! use permubench_core::{run_once, BenchmarkSpec, MutationConfig};
//!
//! let spec = BenchmarkSpec::p_ham(8).unwrap();
//! let rec = run_once(&spec, &MutationConfig::swap(), 100_000, 7, None).unwrap();
//! assert!(rec.success);
//! ```

pub mod benchmarks;
pub mod engine;
pub mod error;
pub mod mutation;
pub mod oracles;
pub mod perm;
pub mod random;

pub use benchmarks::{
    bitstring, indicator_string, lift_pseudo_boolean, BenchmarkKind, BenchmarkSpec, FitnessValue, IndicatorString,
    LiftedFunction, OptimumRule, PseudoBooleanFn,
};
pub use engine::{
    mean_and_se, run_batch, run_once, run_with, theoretical_order, theory_budget, BatchOptions, BatchSummary,
    RunOptions, RunRecord, StartPolicy, DEFAULT_BUDGET_FACTOR,
};
pub use error::{Error, Result};
pub use mutation::{
    mutate, scramble_mutate, swap_mutate, MutationConfig, MutationSpec, Mutator, Operator, DEFAULT_POWER_LAW_BETA,
};
pub use perm::{
    apply_transposition, classify_region, compose, cycle_decomposition, fixed_point_count, is_good_local_optimum,
    min_transpositions_to_identity, CycleDecomposition, Permutation, RegionLabel, Transposition,
};
pub use random::{
    derive_seed, poisson_pmf, poisson_sample, power_law_sample, random_k_subset, random_permutation_uniform,
    random_transposition, splitmix64_mix, subset_shuffle, CountDistribution, CountSpec, PowerLaw, RandomStream,
};
