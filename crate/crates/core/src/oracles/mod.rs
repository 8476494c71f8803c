//! Exact and brute-force references for the engine, the operators and the
//! probability bounds of the runtime analysis.

pub mod bfs;
pub mod cycle_type;
pub mod estimate;
pub mod exact;
pub mod hitting;
pub mod jump;
pub mod kernel;

pub use bfs::{good_distance_bfs, good_distance_table, MAX_BFS_N};
pub use cycle_type::{same_cycle_probability_brute, same_cycle_probability_exact, CycleType, SameCycleProbability};
pub use estimate::{cycle_change_probability_estimate, improvement_probability_estimate, Estimate};
pub use exact::ExpLinear;
pub use hitting::{ea_hitting_time_exact, ea_hitting_time_with_tail, HittingTime};
pub use jump::{
    minimal_factorization_count, one_step_jump_probability_exact, swap_minimal_sequence_probability, JumpProbability,
    JumpValueKind,
};
pub use kernel::{
    ea_step_kernel, mutation_kernel_exact, scramble_exact_subset_term, scramble_rho_probability,
    scramble_rho_probability_exact, swap_kernel_via_matrix_exponential, transposition_kernel, ExactKernel, KernelKind,
    MutationLaw, StateSpace, DEFAULT_TAIL_BOUND, MAX_KERNEL_N,
};
