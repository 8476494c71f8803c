//! Seeded random primitives.
//!
//! The base generator is xoshiro256++ seeded through SplitMix64 (the
//! `rand_xoshiro` implementation). Everything above the raw 64-bit stream
//! (bounded integers, unit floats, Poisson and power-law inversion, subset
//! selection, shuffles) is implemented here so draw sequences are fixed by
//! this crate and not by a distribution library's version.

use std::sync::Arc;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::perm::{Permutation, Transposition};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `index` under `master_seed`:
/// `mix(master_seed + (index + 1) · γ)` with `γ = 0x9E3779B97F4A7C15` and
/// `mix` the SplitMix64 finalizer. This is the `(index+1)`-th output of a
/// SplitMix64 stream started at `master_seed`, so it does not depend on the
/// order in which runs are scheduled.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64_mix(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// A single-owner random stream.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    rng: Xoshiro256PlusPlus,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `0..bound` (Lemire's multiply-and-reject).
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut m = (self.next_u64() as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = (self.next_u64() as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    #[inline]
    pub fn below_usize(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Uniform float in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below_usize(i + 1);
            items.swap(i, j);
        }
    }
}

/// The law of the number of elementary operations a mutation performs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CountRepr", into = "CountRepr")]
pub enum CountDistribution {
    Poisson { lambda: f64 },
    PowerLaw(PowerLaw),
}

/// `Pr[X = i] = C · i^{−β}` on `[1..u]`, with the cumulative table
/// precomputed for inversion sampling.
#[derive(Clone, Debug)]
pub struct PowerLaw {
    beta: f64,
    u: usize,
    cdf: Arc<[f64]>,
    normalizer: f64,
}

impl PartialEq for PowerLaw {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta && self.u == other.u
    }
}

impl PowerLaw {
    pub fn new(beta: f64, u: usize) -> Result<Self> {
        if !(beta.is_finite() && beta > 1.0) {
            return Err(invalid(format!("power-law exponent must exceed 1, got {beta}")));
        }
        if u < 1 {
            return Err(invalid("power-law range u must be at least 1"));
        }
        let weights: Vec<f64> = (1..=u).map(|i| (i as f64).powf(-beta)).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        *cdf.last_mut().expect("u >= 1") = 1.0;
        Ok(Self {
            beta,
            u,
            cdf: cdf.into(),
            normalizer: 1.0 / total,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn range(&self) -> usize {
        self.u
    }

    /// `C_{β,u} = (Σ_{k=1..u} k^{−β})^{−1}`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn pmf(&self, k: usize) -> f64 {
        if k == 0 || k > self.u {
            0.0
        } else {
            self.normalizer * (k as f64).powf(-self.beta)
        }
    }

    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> usize {
        let x = rng.unit();
        let idx = self.cdf.partition_point(|&c| c <= x);
        idx.min(self.u - 1) + 1
    }
}

impl CountDistribution {
    pub fn poisson(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(CountDistribution::Poisson { lambda })
    }

    pub fn power_law(beta: f64, u: usize) -> Result<Self> {
        Ok(CountDistribution::PowerLaw(PowerLaw::new(beta, u)?))
    }

    #[inline]
    pub fn sample(&self, rng: &mut RandomStream) -> usize {
        match self {
            CountDistribution::Poisson { lambda } => poisson_inversion(*lambda, rng),
            CountDistribution::PowerLaw(pl) => pl.sample(rng),
        }
    }

    pub fn pmf(&self, k: usize) -> f64 {
        match self {
            CountDistribution::Poisson { lambda } => poisson_pmf(*lambda, k),
            CountDistribution::PowerLaw(pl) => pl.pmf(k),
        }
    }

    /// Smallest `K` with `Pr[X > K] < tail`; `None` never happens for the
    /// power law, whose support is finite.
    pub fn truncation_point(&self, tail: f64) -> usize {
        match self {
            CountDistribution::PowerLaw(pl) => pl.u,
            CountDistribution::Poisson { lambda } => {
                let mut k = 0;
                let mut mass = poisson_pmf(*lambda, 0);
                while 1.0 - mass >= tail && k < 10_000 {
                    k += 1;
                    mass += poisson_pmf(*lambda, k);
                }
                // 1 - mass loses precision near 1; add terms until they are
                // negligible against the tail bound as well.
                while poisson_pmf(*lambda, k + 1) >= tail * 1e-3 && k < 10_000 {
                    k += 1;
                }
                k
            }
        }
    }

    /// Short label used in CSV keys: `poisson(1)`, `powerlaw(1.5,12)`.
    pub fn label(&self) -> String {
        match self {
            CountDistribution::Poisson { lambda } => format!("poisson({lambda})"),
            CountDistribution::PowerLaw(pl) => format!("powerlaw({},{})", pl.beta, pl.u),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum CountRepr {
    Poisson { lambda: f64 },
    #[serde(alias = "power_law")]
    PowerLaw { beta: f64, u: usize },
}

impl TryFrom<CountRepr> for CountDistribution {
    type Error = Error;

    fn try_from(r: CountRepr) -> Result<Self> {
        match r {
            CountRepr::Poisson { lambda } => CountDistribution::poisson(lambda),
            CountRepr::PowerLaw { beta, u } => CountDistribution::power_law(beta, u),
        }
    }
}

impl From<CountDistribution> for CountRepr {
    fn from(c: CountDistribution) -> Self {
        match c {
            CountDistribution::Poisson { lambda } => CountRepr::Poisson { lambda },
            CountDistribution::PowerLaw(pl) => CountRepr::PowerLaw {
                beta: pl.beta,
                u: pl.u,
            },
        }
    }
}

/// A count law whose power-law range may be left open and bound to the
/// problem size later (`u = n`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CountSpec {
    Poisson {
        lambda: f64,
    },
    #[serde(alias = "power_law")]
    PowerLaw {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<usize>,
    },
}

impl CountSpec {
    pub fn resolve(&self, n: usize) -> Result<CountDistribution> {
        match *self {
            CountSpec::Poisson { lambda } => CountDistribution::poisson(lambda),
            CountSpec::PowerLaw { beta, u } => CountDistribution::power_law(beta, u.unwrap_or(n)),
        }
    }

    /// `poisson(1)`, `powerlaw(1.5,n)` when the range tracks `n`, else
    /// `powerlaw(1.5,10)`.
    pub fn label(&self) -> String {
        match self {
            CountSpec::Poisson { lambda } => format!("poisson({lambda})"),
            CountSpec::PowerLaw { beta, u: None } => format!("powerlaw({beta},n)"),
            CountSpec::PowerLaw { beta, u: Some(u) } => format!("powerlaw({beta},{u})"),
        }
    }
}

impl std::str::FromStr for CountSpec {
    type Err = Error;

    /// `poisson:1`, `powerlaw:1.5` (range `n`) or `powerlaw:1.5:10`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in count law {s:?}")))
        };
        let spec = match parts.as_slice() {
            ["poisson"] => CountSpec::Poisson { lambda: 1.0 },
            ["poisson", l] => CountSpec::Poisson { lambda: num(l)? },
            ["powerlaw", b] => CountSpec::PowerLaw {
                beta: num(b)?,
                u: None,
            },
            ["powerlaw", b, u] => CountSpec::PowerLaw {
                beta: num(b)?,
                u: Some(
                    u.parse()
                        .map_err(|_| Error::Parse(format!("bad range {u:?} in count law {s:?}")))?,
                ),
            },
            _ => return Err(Error::Parse(format!("unknown count law {s:?}"))),
        };
        // Validate parameters eagerly; the range is checked against a dummy n.
        spec.resolve(1)?;
        Ok(spec)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0 && lambda <= 500.0) {
        return Err(invalid(format!("Poisson mean must lie in (0, 500], got {lambda}")));
    }
    Ok(())
}

pub fn poisson_pmf(lambda: f64, k: usize) -> f64 {
    let mut p = (-lambda).exp();
    for i in 1..=k {
        p *= lambda / i as f64;
    }
    p
}

/// Sequential-search inversion: exact up to floating-point rounding.
#[inline]
fn poisson_inversion(lambda: f64, rng: &mut RandomStream) -> usize {
    let u = rng.unit();
    let mut k = 0usize;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u >= cdf {
        k += 1;
        p *= lambda / k as f64;
        let next = cdf + p;
        if next == cdf {
            // The remaining tail is below rounding; the draw ends here.
            break;
        }
        cdf = next;
    }
    k
}

pub fn poisson_sample(lambda: f64, rng: &mut RandomStream) -> Result<usize> {
    check_lambda(lambda)?;
    Ok(poisson_inversion(lambda, rng))
}

/// One draw from `Pow(β, u)`. Builds the cumulative table on each call; hot
/// loops should hold a [`CountDistribution`] instead.
pub fn power_law_sample(beta: f64, u: usize, rng: &mut RandomStream) -> Result<usize> {
    Ok(PowerLaw::new(beta, u)?.sample(rng))
}

pub fn random_transposition(n: usize, rng: &mut RandomStream) -> Result<Transposition> {
    if n < 2 {
        return Err(invalid(format!("a transposition needs n >= 2, got {n}")));
    }
    let (a, b) = random_pair(n, rng);
    Transposition::new(a + 1, b + 1)
}

/// Uniform ordered pair of distinct values in `0..n`.
#[inline]
pub(crate) fn random_pair(n: usize, rng: &mut RandomStream) -> (usize, usize) {
    let a = rng.below_usize(n);
    let mut b = rng.below_usize(n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Uniform `k`-subset of `[1..n]`, sorted ascending.
pub fn random_k_subset(n: usize, k: usize, rng: &mut RandomStream) -> Result<Vec<usize>> {
    if k > n {
        return Err(invalid(format!("cannot choose {k} of {n} elements")));
    }
    let mut scratch = SubsetScratch::default();
    let mut out: Vec<usize> = scratch
        .sample(n, k, rng)
        .iter()
        .map(|&i| i as usize + 1)
        .collect();
    out.sort_unstable();
    Ok(out)
}

pub fn random_permutation_uniform(n: usize, rng: &mut RandomStream) -> Result<Permutation> {
    if n < 1 {
        return Err(invalid("permutation size must be at least 1"));
    }
    let mut images: Vec<u32> = (0..n as u32).collect();
    rng.shuffle(&mut images);
    Ok(Permutation::from_zero_based_unchecked(images))
}

/// `ρ ∘ σ` for `ρ` uniform over the permutations of the label set `labels`
/// (fixed points allowed). Word entries holding labels outside the set are
/// untouched.
pub fn subset_shuffle(sigma: &Permutation, labels: &[usize], rng: &mut RandomStream) -> Result<Permutation> {
    let n = sigma.size();
    let mut set: Vec<usize> = labels.to_vec();
    set.sort_unstable();
    for w in set.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateLabel(w[0]));
        }
    }
    if let Some(&bad) = set.iter().find(|&&l| l == 0 || l > n) {
        return Err(Error::LabelOutOfRange { label: bad, n });
    }
    let mut targets = set.clone();
    rng.shuffle(&mut targets);
    let mut rho: Vec<u32> = (0..n as u32).collect();
    for (&from, &to) in set.iter().zip(&targets) {
        rho[from - 1] = (to - 1) as u32;
    }
    let images = sigma
        .as_zero_based()
        .iter()
        .map(|&v| rho[v as usize])
        .collect();
    Ok(Permutation::from_zero_based_unchecked(images))
}

/// Scratch space for Floyd's subset sampling with O(1) membership tests.
#[derive(Default, Debug, Clone)]
pub(crate) struct SubsetScratch {
    stamp: Vec<u32>,
    epoch: u32,
    out: Vec<u32>,
}

impl SubsetScratch {
    /// Uniform `k`-subset of `0..n` (Floyd's algorithm). The returned order
    /// is not uniform; callers shuffle whatever they place there.
    pub(crate) fn sample(&mut self, n: usize, k: usize, rng: &mut RandomStream) -> &[u32] {
        debug_assert!(k <= n);
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.out.clear();
        for j in (n - k)..n {
            let t = rng.below_usize(j + 1);
            let pick = if self.stamp[t] == self.epoch { j } else { t };
            self.stamp[pick] = self.epoch;
            self.out.push(pick as u32);
        }
        &self.out
    }
}
