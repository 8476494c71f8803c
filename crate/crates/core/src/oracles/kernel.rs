//! Exact mutation laws and transition kernels on `S_n` for small `n`.
//!
//! Every operator returns `ρ ∘ σ` with `ρ` drawn from a law that does not
//! depend on `σ`, so the kernel is `M(σ, ρσ) = w(ρ)` for a single weight
//! vector `w` on `S_n`. Swap weights come from propagating the point mass at
//! the identity through the transposition walk and mixing the `k`-step
//! distributions with the count law; scramble weights have a closed form in
//! the number of labels `ρ` displaces.

use num_bigint::BigInt;
use num_traits::One;

use crate::benchmarks::BenchmarkSpec;
use crate::error::{invalid, Error, Result};
use crate::mutation::{MutationConfig, Operator};
use crate::oracles::exact::{big_binomial, big_factorial, poisson1_clamped, ratio, ExpLinear};
use crate::perm::{factorial, Permutation, Transposition};
use crate::random::CountDistribution;

/// Largest `n` for which kernels over all of `S_n` are built.
pub const MAX_KERNEL_N: usize = 7;

/// Default truncation for Poisson-weighted transposition sums.
pub const DEFAULT_TAIL_BOUND: f64 = 1e-12;

pub(crate) fn check_kernel_n(n: usize) -> Result<()> {
    if n > MAX_KERNEL_N {
        return Err(Error::TooLarge(format!(
            "exact kernels enumerate S_n and are limited to n <= {MAX_KERNEL_N}, got {n}"
        )));
    }
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(())
}

/// All of `S_n` in lexicographic order; index = lexicographic rank.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub n: usize,
    pub states: Vec<Permutation>,
}

impl StateSpace {
    pub fn new(n: usize) -> Result<Self> {
        check_kernel_n(n)?;
        Ok(Self {
            n,
            states: Permutation::all(n).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index(&self, p: &Permutation) -> usize {
        p.lex_rank()
    }

    /// Index of `outer ∘ inner`.
    pub fn compose_index(&self, outer: usize, inner: usize) -> usize {
        let o = self.states[outer].as_zero_based();
        let i = self.states[inner].as_zero_based();
        let word: Vec<u32> = i.iter().map(|&v| o[v as usize]).collect();
        Permutation::from_zero_based_unchecked(word).lex_rank()
    }
}

/// The law of `ρ` for one mutation, indexed by lexicographic rank.
#[derive(Debug, Clone)]
pub struct MutationLaw {
    pub n: usize,
    pub weights: Vec<f64>,
    /// Probability mass dropped by truncating the count law.
    pub truncation_error: f64,
}

impl MutationLaw {
    pub fn new(n: usize, mcfg: &MutationConfig, tail_bound: f64) -> Result<Self> {
        check_kernel_n(n)?;
        if !(tail_bound > 0.0 && tail_bound < 1.0) {
            return Err(invalid(format!("tail bound must lie in (0, 1), got {tail_bound}")));
        }
        match mcfg.operator {
            Operator::Swap => swap_law(n, &mcfg.counts, mcfg.plus_one, tail_bound),
            Operator::Scramble => Ok(scramble_law(n, &mcfg.counts)),
        }
    }

    /// One uniform transposition.
    pub fn single_transposition(n: usize) -> Result<Self> {
        check_kernel_n(n)?;
        if n < 2 {
            return Err(invalid("a transposition needs n >= 2"));
        }
        let mut weights = vec![0.0; factorial(n)];
        let pairs = (n * (n - 1) / 2) as f64;
        for t in Transposition::all(n) {
            weights[t.to_permutation(n)?.lex_rank()] = 1.0 / pairs;
        }
        Ok(Self {
            n,
            weights,
            truncation_error: 0.0,
        })
    }

    pub fn weight(&self, rho: &Permutation) -> f64 {
        self.weights[rho.lex_rank()]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn count_tail(counts: &CountDistribution, from: usize) -> f64 {
    // Summed term by term to avoid cancellation in 1 − Σ.
    match counts {
        CountDistribution::PowerLaw(pl) => (from..=pl.range()).map(|k| pl.pmf(k)).sum(),
        CountDistribution::Poisson { .. } => {
            let mut tail = 0.0;
            let mut k = from;
            loop {
                let p = counts.pmf(k);
                tail += p;
                if (p < 1e-300 || p < tail * 1e-17) && k > from + 5 {
                    break;
                }
                k += 1;
            }
            tail
        }
    }
}

fn swap_law(n: usize, counts: &CountDistribution, plus_one: bool, tail_bound: f64) -> Result<MutationLaw> {
    let size = factorial(n);
    let k_max = counts.truncation_point(tail_bound);
    let truncation_error = count_tail(counts, k_max + 1);
    let offset = usize::from(plus_one);
    let mut weights = vec![0.0; size];
    if n < 2 {
        // No transposition exists; every mutation is the identity.
        weights[0] = 1.0 - truncation_error;
        return Ok(MutationLaw {
            n,
            weights,
            truncation_error,
        });
    }
    let space = StateSpace::new(n)?;
    let ts: Vec<usize> = Transposition::all(n)
        .map(|t| t.to_permutation(n).map(|p| p.lex_rank()))
        .collect::<Result<_>>()?;
    let step: Vec<usize> = (0..size)
        .flat_map(|r| ts.iter().map(move |&t| (r, t)))
        .map(|(r, t)| space.compose_index(t, r))
        .collect();
    let share = 1.0 / ts.len() as f64;
    let mut dist = vec![0.0; size];
    dist[0] = 1.0;
    let mut next = vec![0.0; size];
    for steps in 0..=(k_max + offset) {
        if steps >= offset {
            let p = counts.pmf(steps - offset);
            if p > 0.0 {
                for (w, d) in weights.iter_mut().zip(&dist) {
                    *w += p * d;
                }
            }
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for (r, &d) in dist.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for &to in &step[r * ts.len()..(r + 1) * ts.len()] {
                next[to] += d * share;
            }
        }
        std::mem::swap(&mut dist, &mut next);
    }
    Ok(MutationLaw {
        n,
        weights,
        truncation_error,
    })
}

/// Scramble count weights on `0..=n`, with the mass above `n` moved to `n`.
fn clamped_count_weights(n: usize, counts: &CountDistribution) -> Vec<f64> {
    let mut q: Vec<f64> = (0..n).map(|k| counts.pmf(k)).collect();
    q.push(count_tail(counts, n));
    q
}

/// Probability that one scramble produces one specific `ρ` displacing
/// `displaced` labels: `Σ_k q_k · C(n−d, k−d) / (C(n,k) · k!)`.
pub fn scramble_rho_probability(n: usize, displaced: usize, counts: &CountDistribution) -> f64 {
    let q = clamped_count_weights(n, counts);
    scramble_rho_from_weights(n, displaced, &q)
}

fn scramble_rho_from_weights(n: usize, d: usize, q: &[f64]) -> f64 {
    let binom = |a: usize, b: usize| -> f64 {
        if b > a {
            return 0.0;
        }
        let b = b.min(a - b);
        (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
    };
    let fact = |k: usize| -> f64 { (1..=k).map(|i| i as f64).product() };
    (d..=n)
        .map(|k| q[k] * binom(n - d, k - d) / (binom(n, k) * fact(k)))
        .sum()
}

/// [`scramble_rho_probability`] for Poisson(1) counts, exactly.
pub fn scramble_rho_probability_exact(n: usize, displaced: usize) -> ExpLinear {
    (displaced..=n)
        .map(|k| {
            let coeff = ratio(
                big_binomial(n - displaced, k - displaced),
                big_binomial(n, k) * big_factorial(k),
            );
            poisson1_clamped(k, n).scale(&coeff)
        })
        .fold(ExpLinear::zero(), |a, b| a + b)
}

/// The `k = d` term alone: `(1/(e·d!)) · C(n,d)^{−1} · (d!)^{−1}`, the
/// probability of scrambling exactly the displaced labels into place.
pub fn scramble_exact_subset_term(n: usize, displaced: usize) -> ExpLinear {
    let den = big_factorial(displaced) * big_binomial(n, displaced) * big_factorial(displaced);
    ExpLinear::inv_e(ratio(BigInt::one(), den))
}

fn scramble_law(n: usize, counts: &CountDistribution) -> MutationLaw {
    let q = clamped_count_weights(n, counts);
    let by_support: Vec<f64> = (0..=n).map(|d| scramble_rho_from_weights(n, d, &q)).collect();
    let weights = Permutation::all(n)
        .map(|rho| by_support[n - rho.fixed_point_count()])
        .collect();
    MutationLaw {
        n,
        weights,
        truncation_error: 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// One uniform transposition.
    Transposition,
    /// One mutation.
    Mutation,
    /// Mutation followed by elitist acceptance.
    EaStep,
}

/// A dense row-stochastic matrix over `S_n` in lexicographic order.
#[derive(Debug, Clone)]
pub struct ExactKernel {
    pub n: usize,
    pub kind: KernelKind,
    pub states: Vec<Permutation>,
    /// Row-major `states.len() × states.len()`.
    pub probabilities: Vec<f64>,
    /// Row mass missing because the count law was truncated.
    pub truncation_error: f64,
}

impl ExactKernel {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.probabilities[from * self.dim() + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        let d = self.dim();
        &self.probabilities[from * d..(from + 1) * d]
    }

    /// Largest `|1 − Σ_j P(i, j)|` over rows.
    pub fn max_row_deviation(&self) -> f64 {
        (0..self.dim())
            .map(|i| (1.0 - self.row(i).iter().sum::<f64>()).abs())
            .fold(0.0, f64::max)
    }

    /// Non-zero entries as `(row, col, probability)` with 0-based
    /// lexicographic state indices.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let d = self.dim();
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != 0.0)
            .map(move |(i, &p)| (i / d, i % d, p))
    }

    /// CSV with header `row,col,probability`; indices are lexicographic
    /// ranks, probabilities printed with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,probability\n");
        for (r, c, p) in self.triplets() {
            out.push_str(&format!("{r},{c},{p:.16e}\n"));
        }
        out
    }
}

fn kernel_from_law(law: &MutationLaw, kind: KernelKind) -> Result<ExactKernel> {
    let space = StateSpace::new(law.n)?;
    let d = space.len();
    let mut probabilities = vec![0.0; d * d];
    let support: Vec<(usize, f64)> = law
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| (i, w))
        .collect();
    for s in 0..d {
        for &(rho, w) in &support {
            probabilities[s * d + space.compose_index(rho, s)] += w;
        }
    }
    Ok(ExactKernel {
        n: law.n,
        kind,
        states: space.states,
        probabilities,
        truncation_error: law.truncation_error,
    })
}

/// Kernel of one uniform transposition, `T`.
pub fn transposition_kernel(n: usize) -> Result<ExactKernel> {
    kernel_from_law(&MutationLaw::single_transposition(n)?, KernelKind::Transposition)
}

/// Exact kernel of one mutation. Swap with Poisson counts is truncated where
/// the Poisson tail drops below `tail_bound`; the dropped mass is reported
/// in [`ExactKernel::truncation_error`]. Scramble and power-law counts are
/// exact finite sums.
pub fn mutation_kernel_exact(n: usize, mcfg: &MutationConfig, tail_bound: f64) -> Result<ExactKernel> {
    let law = MutationLaw::new(n, mcfg, tail_bound)?;
    kernel_from_law(&law, KernelKind::Mutation)
}

/// One EA iteration: mutation, then keep the offspring iff it is not worse.
/// Optimal states are absorbing. Mass dropped by truncation stays put.
pub fn ea_step_kernel(spec: &BenchmarkSpec, mcfg: &MutationConfig, tail_bound: f64) -> Result<ExactKernel> {
    let n = spec.n();
    let law = MutationLaw::new(n, mcfg, tail_bound)?;
    let space = StateSpace::new(n)?;
    let d = space.len();
    let fitness: Vec<i64> = space.states.iter().map(|s| spec.evaluate_word(s.as_zero_based()).0).collect();
    let optimal: Vec<bool> = space
        .states
        .iter()
        .map(|s| spec.is_global_optimum(s))
        .collect::<Result<_>>()?;
    let mut probabilities = vec![0.0; d * d];
    for s in 0..d {
        if optimal[s] {
            probabilities[s * d + s] = 1.0;
            continue;
        }
        let mut moved = 0.0;
        for (rho, &w) in law.weights.iter().enumerate() {
            if w == 0.0 || rho == 0 {
                continue;
            }
            let t = space.compose_index(rho, s);
            if fitness[t] >= fitness[s] {
                probabilities[s * d + t] += w;
                moved += w;
            }
        }
        probabilities[s * d + s] = 1.0 - moved;
    }
    Ok(ExactKernel {
        n,
        kind: KernelKind::EaStep,
        states: space.states,
        probabilities,
        truncation_error: law.truncation_error,
    })
}

/// `exp(λ(T − I))` by scaling and squaring a dense matrix: the swap kernel
/// with Poisson(λ) counts computed without the series in `k` that
/// [`mutation_kernel_exact`] uses. Limited to `n <= 5`.
pub fn swap_kernel_via_matrix_exponential(n: usize, lambda: f64) -> Result<Vec<f64>> {
    if n > 5 {
        return Err(Error::TooLarge(format!("dense exponential limited to n <= 5, got {n}")));
    }
    let t = transposition_kernel(n)?;
    let d = t.dim();
    let mut a: Vec<f64> = t.probabilities.iter().map(|p| lambda * p).collect();
    for i in 0..d {
        a[i * d + i] -= lambda;
    }
    // ‖λ(T − I)‖_∞ <= 2λ; scale below 1/2.
    let mut squarings = 0;
    let mut norm = 2.0 * lambda;
    while norm > 0.5 {
        norm /= 2.0;
        squarings += 1;
    }
    let scale = 0.5f64.powi(squarings);
    a.iter_mut().for_each(|x| *x *= scale);
    let mut result = identity(d);
    let mut term = identity(d);
    for k in 1..=30 {
        term = matmul(&term, &a, d);
        term.iter_mut().for_each(|x| *x /= k as f64);
        result.iter_mut().zip(&term).for_each(|(r, t)| *r += t);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result, d);
    }
    Ok(result)
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}
