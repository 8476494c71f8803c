//! Swap and scramble mutation.
//!
//! Both operators return `ρ ∘ σ` for a random `ρ` whose law does not depend
//! on `σ`. Swap draws `k` from the count law (`k + 1` with `plus_one`) and
//! composes `k` independent uniform transpositions. Scramble draws `k`,
//! clamps it to `n`, picks a uniform `k`-subset and permutes it uniformly.
//! With a power-law count law and range `n`, scramble is the heavy-tailed
//! scramble operator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::perm::Permutation;
use crate::random::{random_pair, CountDistribution, CountSpec, RandomStream, SubsetScratch};

/// Default power-law exponent for heavy-tailed scramble.
pub const DEFAULT_POWER_LAW_BETA: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    Swap,
    Scramble,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Swap => "swap",
            Operator::Scramble => "scramble",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationConfig {
    pub operator: Operator,
    pub counts: CountDistribution,
    /// Swap only: perform `k + 1` transpositions instead of `k`.
    #[serde(default)]
    pub plus_one: bool,
}

impl MutationConfig {
    pub fn new(operator: Operator, counts: CountDistribution, plus_one: bool) -> Result<Self> {
        if plus_one && operator != Operator::Swap {
            return Err(invalid("plus_one applies to swap mutation only"));
        }
        Ok(Self {
            operator,
            counts,
            plus_one,
        })
    }

    /// Poisson(1) many uniform transpositions.
    pub fn swap() -> Self {
        Self {
            operator: Operator::Swap,
            counts: CountDistribution::Poisson { lambda: 1.0 },
            plus_one: false,
        }
    }

    /// Scramble a Poisson(1)-sized uniform subset.
    pub fn scramble() -> Self {
        Self {
            operator: Operator::Scramble,
            counts: CountDistribution::Poisson { lambda: 1.0 },
            plus_one: false,
        }
    }

    /// Scramble with `k ~ Pow(β, n)`.
    pub fn heavy_tailed_scramble(beta: f64, n: usize) -> Result<Self> {
        Ok(Self {
            operator: Operator::Scramble,
            counts: CountDistribution::power_law(beta, n)?,
            plus_one: false,
        })
    }

    /// `swap`, `swap+1` or `scramble`.
    pub fn operator_label(&self) -> &'static str {
        match (self.operator, self.plus_one) {
            (Operator::Swap, false) => "swap",
            (Operator::Swap, true) => "swap+1",
            (Operator::Scramble, _) => "scramble",
        }
    }
}

/// A mutation configuration whose power-law range may track `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutationSpec {
    pub operator: Operator,
    pub counts: CountSpec,
    #[serde(default)]
    pub plus_one: bool,
}

impl MutationSpec {
    pub fn resolve(&self, n: usize) -> Result<MutationConfig> {
        MutationConfig::new(self.operator, self.counts.resolve(n)?, self.plus_one)
    }

    pub fn operator_label(&self) -> &'static str {
        match (self.operator, self.plus_one) {
            (Operator::Swap, false) => "swap",
            (Operator::Swap, true) => "swap+1",
            (Operator::Scramble, _) => "scramble",
        }
    }

    /// `operator/counts`, e.g. `scramble/powerlaw(1.5,n)`.
    pub fn label(&self) -> String {
        format!("{}/{}", self.operator_label(), self.counts.label())
    }
}

/// In-place mutation with reusable scratch space.
#[derive(Debug, Clone)]
pub struct Mutator {
    cfg: MutationConfig,
    subset: SubsetScratch,
    values: Vec<u32>,
}

impl Mutator {
    pub fn new(cfg: MutationConfig) -> Self {
        Self {
            cfg,
            subset: SubsetScratch::default(),
            values: Vec::new(),
        }
    }

    pub fn config(&self) -> &MutationConfig {
        &self.cfg
    }

    /// Mutates a 0-based word in place, logging `(position, old value)` for
    /// every write to `undo` (replaying it backwards restores the parent).
    /// Returns the number of elementary operations drawn: transpositions for
    /// swap, the clamped subset size for scramble.
    #[inline]
    pub fn mutate_word(&mut self, word: &mut [u32], rng: &mut RandomStream, undo: &mut Vec<(u32, u32)>) -> usize {
        let n = word.len();
        match self.cfg.operator {
            Operator::Swap => {
                let k = self.cfg.counts.sample(rng) + usize::from(self.cfg.plus_one);
                if n < 2 {
                    return k;
                }
                for _ in 0..k {
                    // A uniform pair of positions holds a uniform pair of
                    // labels, so this is composition with a uniform
                    // transposition.
                    let (i, j) = random_pair(n, rng);
                    undo.push((i as u32, word[i]));
                    undo.push((j as u32, word[j]));
                    word.swap(i, j);
                }
                k
            }
            Operator::Scramble => {
                let k = self.cfg.counts.sample(rng).min(n);
                if k <= 1 {
                    return k;
                }
                // Selecting the positions that hold a uniform label subset
                // is the same as selecting a uniform position subset.
                let positions = self.subset.sample(n, k, rng);
                self.values.clear();
                self.values.extend(positions.iter().map(|&p| word[p as usize]));
                rng.shuffle(&mut self.values);
                for (&p, &v) in positions.iter().zip(&self.values) {
                    undo.push((p, word[p as usize]));
                    word[p as usize] = v;
                }
                k
            }
        }
    }

    pub fn mutate(&mut self, sigma: &Permutation, rng: &mut RandomStream) -> Permutation {
        let mut word = sigma.as_zero_based().to_vec();
        let mut undo = Vec::new();
        self.mutate_word(&mut word, rng, &mut undo);
        Permutation::from_zero_based_unchecked(word)
    }
}

pub(crate) fn undo_writes(word: &mut [u32], undo: &mut Vec<(u32, u32)>) {
    while let Some((p, v)) = undo.pop() {
        word[p as usize] = v;
    }
}

pub fn mutate(sigma: &Permutation, cfg: &MutationConfig, rng: &mut RandomStream) -> Permutation {
    Mutator::new(cfg.clone()).mutate(sigma, rng)
}

pub fn swap_mutate(
    sigma: &Permutation,
    counts: &CountDistribution,
    plus_one: bool,
    rng: &mut RandomStream,
) -> Result<Permutation> {
    if sigma.size() < 2 {
        return Err(invalid("swap mutation needs n >= 2"));
    }
    let cfg = MutationConfig::new(Operator::Swap, counts.clone(), plus_one)?;
    Ok(mutate(sigma, &cfg, rng))
}

pub fn scramble_mutate(sigma: &Permutation, counts: &CountDistribution, rng: &mut RandomStream) -> Permutation {
    let cfg = MutationConfig {
        operator: Operator::Scramble,
        counts: counts.clone(),
        plus_one: false,
    };
    mutate(sigma, &cfg, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undo_restores_parent() {
        let mut rng = RandomStream::new(5);
        for cfg in [
            MutationConfig::swap(),
            MutationConfig::scramble(),
            MutationConfig::heavy_tailed_scramble(1.5, 9).unwrap(),
        ] {
            let mut m = Mutator::new(cfg);
            let parent: Vec<u32> = (0..9).rev().collect();
            let mut word = parent.clone();
            let mut undo = Vec::new();
            for _ in 0..200 {
                m.mutate_word(&mut word, &mut rng, &mut undo);
                undo_writes(&mut word, &mut undo);
                assert_eq!(word, parent);
            }
        }
    }

    #[test]
    fn plus_one_never_returns_zero_transpositions() {
        let mut rng = RandomStream::new(9);
        let cfg = MutationConfig::new(Operator::Swap, CountDistribution::poisson(1.0).unwrap(), true).unwrap();
        let mut m = Mutator::new(cfg);
        let mut word: Vec<u32> = (0..6).collect();
        let mut undo = Vec::new();
        for _ in 0..10_000 {
            assert!(m.mutate_word(&mut word, &mut rng, &mut undo) >= 1);
        }
    }

    #[test]
    fn scramble_small_k_returns_parent() {
        let mut rng = RandomStream::new(1);
        let sigma: Permutation = "3,1,2,5,4".parse().unwrap();
        let one = CountDistribution::power_law(50.0, 1).unwrap();
        for _ in 0..100 {
            assert_eq!(scramble_mutate(&sigma, &one, &mut rng), sigma);
        }
    }

    #[test]
    fn scramble_clamps_large_counts() {
        let mut rng = RandomStream::new(2);
        let big = CountDistribution::poisson(40.0).unwrap();
        let mut m = Mutator::new(MutationConfig {
            operator: Operator::Scramble,
            counts: big,
            plus_one: false,
        });
        let mut word: Vec<u32> = (0..4).collect();
        let mut undo = Vec::new();
        for _ in 0..100 {
            assert_eq!(m.mutate_word(&mut word, &mut rng, &mut undo), 4);
            assert!(Permutation::from_zero_based(word.clone()).is_ok());
        }
    }

    #[test]
    fn config_validation_and_labels() {
        assert!(MutationConfig::new(Operator::Scramble, CountDistribution::poisson(1.0).unwrap(), true).is_err());
        assert!(swap_mutate(&Permutation::identity(1), &CountDistribution::poisson(1.0).unwrap(), false, &mut RandomStream::new(0)).is_err());
        let spec = MutationSpec {
            operator: Operator::Scramble,
            counts: CountSpec::PowerLaw { beta: 1.5, u: None },
            plus_one: false,
        };
        assert_eq!(spec.label(), "scramble/powerlaw(1.5,n)");
        let cfg = spec.resolve(12).unwrap();
        assert_eq!(cfg.counts.label(), "powerlaw(1.5,12)");
    }
}
