//! Monte-Carlo estimates of one-step event probabilities.

use serde::Serialize;

use crate::benchmarks::{jump_from_fixed, BenchmarkSpec};
use crate::error::{invalid, Result};
use crate::mutation::{undo_writes, MutationConfig, Mutator};
use crate::perm::{check_jump_parameter, cycle_count, fixed_points, Permutation};
use crate::random::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    /// `sqrt(p(1 − p) / samples)`.
    pub se: f64,
    pub samples: u64,
    pub hits: u64,
}

impl Estimate {
    pub fn from_counts(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        Self {
            p,
            se: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            hits,
        }
    }

    /// `p + z · se`.
    pub fn upper(&self, z: f64) -> f64 {
        self.p + z * self.se
    }
}

/// Fraction of mutations of `σ` whose offspring is strictly fitter.
pub fn improvement_probability_estimate(
    spec: &BenchmarkSpec,
    sigma: &Permutation,
    mcfg: &MutationConfig,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let parent = spec.evaluate(sigma)?.0;
    let mut mutator = Mutator::new(mcfg.clone());
    let mut word = sigma.as_zero_based().to_vec();
    let mut undo = Vec::new();
    let mut hits = 0;
    for _ in 0..samples {
        mutator.mutate_word(&mut word, rng, &mut undo);
        if spec.evaluate_word(&word).0 > parent {
            hits += 1;
        }
        undo_writes(&mut word, &mut undo);
    }
    Ok(Estimate::from_counts(hits, samples))
}

/// Fraction of EA iterations on the jump benchmark, started at a local
/// optimum `σ`, whose accepted point has a different number of cycles.
pub fn cycle_change_probability_estimate(
    sigma: &Permutation,
    m: usize,
    mcfg: &MutationConfig,
    samples: u64,
    rng: &mut RandomStream,
) -> Result<Estimate> {
    let n = sigma.size();
    check_jump_parameter(n, m)?;
    if sigma.fixed_point_count() != n - m {
        return Err(invalid(format!("{sigma} is not a local optimum for m = {m}")));
    }
    if samples == 0 {
        return Err(invalid("samples must be at least 1"));
    }
    let mut seen = Vec::with_capacity(n);
    let mut word = sigma.as_zero_based().to_vec();
    let parent_fit = jump_from_fixed(n, m, n - m);
    let parent_cycles = cycle_count(&word, &mut seen);
    let mut mutator = Mutator::new(mcfg.clone());
    let mut undo = Vec::new();
    let mut hits = 0;
    for _ in 0..samples {
        mutator.mutate_word(&mut word, rng, &mut undo);
        if jump_from_fixed(n, m, fixed_points(&word)) >= parent_fit && cycle_count(&word, &mut seen) != parent_cycles {
            hits += 1;
        }
        undo_writes(&mut word, &mut undo);
    }
    Ok(Estimate::from_counts(hits, samples))
}
