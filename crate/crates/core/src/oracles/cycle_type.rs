use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::perm::Permutation;

/// Conjugacy class of `S_n`: the lengths (at least 2, decreasing) of the
/// non-trivial cycles and the number of fixed points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    lengths: Vec<usize>,
    fixed_points: usize,
}

impl CycleType {
    pub fn new(mut lengths: Vec<usize>, fixed_points: usize) -> Result<Self> {
        if lengths.iter().any(|&l| l < 2) {
            return Err(invalid("cycle lengths must be at least 2"));
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        let ct = Self {
            lengths,
            fixed_points,
        };
        if ct.n() == 0 {
            return Err(invalid("cycle type of an empty permutation"));
        }
        Ok(ct)
    }

    pub fn of(sigma: &Permutation) -> Self {
        Self {
            lengths: sigma.nontrivial_cycle_lengths(),
            fixed_points: sigma.fixed_point_count(),
        }
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn fixed_points(&self) -> usize {
        self.fixed_points
    }

    pub fn n(&self) -> usize {
        self.lengths.iter().sum::<usize>() + self.fixed_points
    }

    /// Number of displaced labels.
    pub fn support(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// Total cycle count, fixed points included.
    pub fn total_cycles(&self) -> usize {
        self.lengths.len() + self.fixed_points
    }

    /// A permutation of this type with cycles on consecutive labels,
    /// longest first, fixed points last.
    pub fn representative(&self) -> Permutation {
        let n = self.n();
        let mut word: Vec<u32> = (0..n as u32).collect();
        let mut start = 0usize;
        for &l in &self.lengths {
            for i in 0..l {
                word[start + i] = (start + (i + 1) % l) as u32;
            }
            start += l;
        }
        Permutation::from_zero_based_unchecked(word)
    }

    /// Every cycle type of `S_n`.
    pub fn all(n: usize) -> Vec<CycleType> {
        (0..=n)
            .flat_map(|support| {
                partitions_min2(support)
                    .into_iter()
                    .map(move |lengths| CycleType {
                        lengths,
                        fixed_points: n - support,
                    })
            })
            .filter(|ct| ct.n() > 0)
            .collect()
    }

    /// Cycle types with exactly `n − m` fixed points.
    pub fn with_support(n: usize, m: usize) -> Vec<CycleType> {
        if m > n {
            return Vec::new();
        }
        partitions_min2(m)
            .into_iter()
            .map(|lengths| CycleType {
                lengths,
                fixed_points: n - m,
            })
            .collect()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, l) in self.lengths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]+{}", self.fixed_points)
    }
}

/// Partitions of `total` into parts of size at least 2, parts decreasing.
fn partitions_min2(total: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (2..=max.min(rest)).rev() {
            cur.push(part);
            go(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, total, &mut Vec::new(), &mut out);
    out
}

/// Probability that a uniform transposition hits two labels of one cycle,
/// with the upper bound in terms of the total cycle count `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SameCycleProbability {
    /// `Σ ℓ_i(ℓ_i − 1) / (n(n − 1))`.
    pub exact: Ratio<u64>,
    /// `(n − r)(n − r + 1) / (n(n − 1))`.
    pub bound: Ratio<u64>,
}

impl SameCycleProbability {
    /// `bound − exact` as a float.
    pub fn margin(&self) -> f64 {
        let f = |r: Ratio<u64>| *r.numer() as f64 / *r.denom() as f64;
        f(self.bound) - f(self.exact)
    }
}

pub fn same_cycle_probability_exact(ct: &CycleType) -> Result<SameCycleProbability> {
    let n = ct.n() as u64;
    if n < 2 {
        return Err(invalid("a transposition needs n >= 2"));
    }
    let pairs = n * (n - 1);
    let num: u64 = ct.lengths.iter().map(|&l| (l * (l - 1)) as u64).sum();
    let r = ct.total_cycles() as u64;
    Ok(SameCycleProbability {
        exact: Ratio::new(num, pairs),
        bound: Ratio::new((n - r) * (n - r + 1), pairs),
    })
}

/// The same probability by enumerating every transposition of `[1..n]` and
/// walking the orbit of one of its labels.
pub fn same_cycle_probability_brute(sigma: &Permutation) -> Result<Ratio<u64>> {
    let n = sigma.size();
    if n < 2 {
        return Err(invalid("a transposition needs n >= 2"));
    }
    let w = sigma.as_zero_based();
    let mut hits = 0u64;
    let mut total = 0u64;
    for a in 0..n {
        for b in (a + 1)..n {
            total += 1;
            let mut cur = w[a] as usize;
            while cur != a {
                if cur == b {
                    hits += 1;
                    break;
                }
                cur = w[cur] as usize;
            }
        }
    }
    Ok(Ratio::new(hits, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::factorial;
    use std::collections::HashMap;

    #[test]
    fn examples() {
        let full = CycleType::new(vec![5], 0).unwrap();
        let p = same_cycle_probability_exact(&full).unwrap();
        assert_eq!(p.exact, Ratio::from_integer(1));
        assert_eq!(p.bound, Ratio::from_integer(1));

        let id = CycleType::new(vec![], 5).unwrap();
        let p = same_cycle_probability_exact(&id).unwrap();
        assert_eq!(p.exact, Ratio::from_integer(0));
        assert_eq!(p.bound, Ratio::from_integer(0));

        let ct = CycleType::new(vec![2, 3], 0).unwrap();
        let p = same_cycle_probability_exact(&ct).unwrap();
        assert_eq!(p.exact, Ratio::new(2, 5));
        assert_eq!(p.bound, Ratio::new(3, 5));
        let sigma: Permutation = "2,1,4,5,3".parse().unwrap();
        assert_eq!(same_cycle_probability_brute(&sigma).unwrap(), Ratio::new(2, 5));
    }

    #[test]
    fn class_sizes_add_up() {
        // Σ over types of the class size n!/(z_λ) must be n!.
        for n in 1..=7 {
            let mut counts: HashMap<CycleType, usize> = HashMap::new();
            for s in Permutation::all(n) {
                *counts.entry(CycleType::of(&s)).or_default() += 1;
            }
            let types = CycleType::all(n);
            assert_eq!(types.len(), counts.len(), "n={n}");
            for ct in &types {
                assert_eq!(CycleType::of(&ct.representative()), *ct);
                assert!(counts.contains_key(ct));
            }
            assert_eq!(counts.values().sum::<usize>(), factorial(n));
        }
    }

    #[test]
    fn support_types() {
        let t = CycleType::with_support(7, 4);
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|ct| ct.fixed_points() == 3 && ct.support() == 4));
        assert!(CycleType::new(vec![1], 3).is_err());
    }
}
