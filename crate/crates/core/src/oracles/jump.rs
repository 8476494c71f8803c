//! Probability that one mutation moves a local optimum of the jump
//! benchmark straight to the identity, per cycle type.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mutation::{MutationConfig, Operator};
use crate::oracles::cycle_type::CycleType;
use crate::oracles::exact::ExpLinear;
use crate::oracles::kernel::{scramble_rho_probability, scramble_rho_probability_exact, MutationLaw, MAX_KERNEL_N};
use crate::perm::{check_jump_parameter, factorial};
use crate::random::CountDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpValueKind {
    /// The probability itself (up to the kernel's truncation error).
    Exact,
    /// Only minimal-length transposition sequences counted.
    MinimalSequenceLowerBound,
}

#[derive(Debug, Clone)]
pub struct JumpProbability {
    pub value: f64,
    pub kind: JumpValueKind,
    /// Exact `a + b/e` form, for scramble with Poisson(1) counts.
    pub exact: Option<ExpLinear>,
}

/// One-step jump probability keyed by the cycle type of the local optimum.
///
/// The mutation must produce `ρ = σ^{-1}`. Scramble gives every `ρ` with the
/// same support the same weight, at any `n`. Swap is read off the exact law
/// for `n <= 7`; above that, only sequences of exactly `m − c` transpositions
/// are counted (`c` the number of non-trivial cycles), which is a lower bound.
pub fn one_step_jump_probability_exact(
    n: usize,
    m: usize,
    mcfg: &MutationConfig,
) -> Result<BTreeMap<CycleType, JumpProbability>> {
    check_jump_parameter(n, m)?;
    let types = CycleType::with_support(n, m);
    let mut out = BTreeMap::new();
    match mcfg.operator {
        Operator::Scramble => {
            let value = scramble_rho_probability(n, m, &mcfg.counts);
            let exact = match mcfg.counts {
                CountDistribution::Poisson { lambda: 1.0 } => Some(scramble_rho_probability_exact(n, m)),
                _ => None,
            };
            for ct in types {
                out.insert(
                    ct,
                    JumpProbability {
                        value,
                        kind: JumpValueKind::Exact,
                        exact: exact.clone(),
                    },
                );
            }
        }
        Operator::Swap if n <= MAX_KERNEL_N => {
            let law = MutationLaw::new(n, mcfg, 1e-15)?;
            for ct in types {
                // Class function: the inverse has the same cycle type.
                let value = law.weight(&ct.representative().inverse());
                out.insert(
                    ct,
                    JumpProbability {
                        value,
                        kind: JumpValueKind::Exact,
                        exact: None,
                    },
                );
            }
        }
        Operator::Swap => {
            if n > 10_000 {
                return Err(Error::TooLarge(format!("n = {n}")));
            }
            for ct in types {
                let value = swap_minimal_sequence_probability(&ct, &mcfg.counts, mcfg.plus_one);
                out.insert(
                    ct,
                    JumpProbability {
                        value,
                        kind: JumpValueKind::MinimalSequenceLowerBound,
                        exact: None,
                    },
                );
            }
        }
    }
    Ok(out)
}

/// Number of ways to write a permutation of this type as a product of the
/// minimum number `ℓ = support − #cycles` of transpositions:
/// `ℓ! · Π c^{c−2} / (c−1)!`.
pub fn minimal_factorization_count(ct: &CycleType) -> f64 {
    let ell = ct.support() - ct.lengths().len();
    let mut count = factorial_f64(ell);
    for &c in ct.lengths() {
        count *= (c as f64).powi(c as i32 - 2) / factorial_f64(c - 1);
    }
    count
}

fn factorial_f64(k: usize) -> f64 {
    if k <= 20 {
        factorial(k) as f64
    } else {
        (1..=k).map(|i| i as f64).product()
    }
}

/// Probability that swap draws exactly `ℓ` transpositions and they multiply
/// to a fixed target of this type, `ℓ` minimal.
pub fn swap_minimal_sequence_probability(ct: &CycleType, counts: &CountDistribution, plus_one: bool) -> f64 {
    let n = ct.n();
    let ell = ct.support() - ct.lengths().len();
    let draws = match ell.checked_sub(usize::from(plus_one)) {
        Some(k) => counts.pmf(k),
        None => return 0.0,
    };
    let pairs = (n * (n - 1) / 2) as f64;
    draws * minimal_factorization_count(ct) / pairs.powi(ell as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{Permutation, Transposition};
    use std::f64::consts::E;

    #[test]
    fn scramble_constant_across_types() {
        for (n, m) in [(5, 3), (7, 4), (12, 5), (30, 6)] {
            let map = one_step_jump_probability_exact(n, m, &MutationConfig::scramble()).unwrap();
            let values: Vec<f64> = map.values().map(|j| j.value).collect();
            assert!(values.windows(2).all(|w| w[0] == w[1]));
            let exact: Vec<&ExpLinear> = map.values().map(|j| j.exact.as_ref().unwrap()).collect();
            assert!(exact.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn scramble_n5_m3_value() {
        let map = one_step_jump_probability_exact(5, 3, &MutationConfig::scramble()).unwrap();
        let p = map.values().next().unwrap().value;
        // At least the k = 3 term.
        assert!(p > 1.0 / (360.0 * E));
        assert!((1.0 / (360.0 * E) - 1.0219e-3).abs() < 1e-7);
    }

    #[test]
    fn factorization_counts_by_brute_force() {
        for n in 2..=5 {
            let ts: Vec<Permutation> = Transposition::all(n).map(|t| t.to_permutation(n).unwrap()).collect();
            for ct in CycleType::all(n) {
                let target = ct.representative();
                let ell = ct.support() - ct.lengths().len();
                let mut count = 0u64;
                let mut stack = vec![(Permutation::identity(n), 0usize)];
                while let Some((p, depth)) = stack.pop() {
                    if depth == ell {
                        count += u64::from(p == target);
                        continue;
                    }
                    for t in &ts {
                        stack.push((t.after(&p).unwrap(), depth + 1));
                    }
                }
                assert_eq!(count as f64, minimal_factorization_count(&ct), "{ct}");
            }
        }
    }

    #[test]
    fn swap_kernel_dominates_minimal_bound() {
        for (n, m) in [(5, 3), (6, 4), (7, 4), (7, 5)] {
            let map = one_step_jump_probability_exact(n, m, &MutationConfig::swap()).unwrap();
            for (ct, j) in &map {
                let bound = swap_minimal_sequence_probability(ct, &CountDistribution::poisson(1.0).unwrap(), false);
                assert!(j.value >= bound * (1.0 - 1e-12), "{ct}: {} < {bound}", j.value);
            }
        }
    }

    #[test]
    fn swap_good_type_beats_single_cycle() {
        let map = one_step_jump_probability_exact(7, 4, &MutationConfig::swap()).unwrap();
        let good = &map[&CycleType::new(vec![2, 2], 3).unwrap()];
        let worst = &map[&CycleType::new(vec![4], 3).unwrap()];
        assert!(worst.value < good.value);
        let pairs = 21.0f64;
        assert!(good.value >= 1.0 / (2.0 * E) / (pairs * pairs));
    }

    #[test]
    fn large_n_swap_uses_minimal_bound() {
        let map = one_step_jump_probability_exact(20, 4, &MutationConfig::swap()).unwrap();
        assert!(map.values().all(|j| j.kind == JumpValueKind::MinimalSequenceLowerBound));
        let good = map[&CycleType::new(vec![2, 2], 16).unwrap()].value;
        let pairs = 190.0f64;
        assert!((good - 2.0 / (2.0 * E) / (pairs * pairs)).abs() < 1e-18);
    }
}
