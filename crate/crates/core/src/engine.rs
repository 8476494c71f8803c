//! The elitist (1+1) EA: mutate, evaluate, keep the offspring if it is not
//! worse, until the optimum is found or the budget runs out.
//!
//! One iteration is one mutation plus one evaluation. The evaluation of the
//! initial search point is not counted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{jump_from_fixed, leading_fixed, BenchmarkKind, BenchmarkSpec, FitnessValue};
use crate::error::{invalid, Error, Result};
use crate::mutation::{undo_writes, MutationConfig, Mutator, Operator};
use crate::perm::{cycle_count, fixed_points, Permutation, RegionLabel};
use crate::random::{derive_seed, random_permutation_uniform, CountDistribution, RandomStream, SubsetScratch};

/// How a run picks its initial search point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StartPolicy {
    UniformRandom,
    Identity,
    Explicit(Permutation),
    /// Uniform over the jump benchmark's good local optima.
    UniformGood,
    /// Uniform over the jump benchmark's local optima.
    UniformA2Plus,
}

impl StartPolicy {
    pub fn label(&self) -> String {
        match self {
            StartPolicy::UniformRandom => "uniform".into(),
            StartPolicy::Identity => "identity".into(),
            StartPolicy::Explicit(p) => p.to_string(),
            StartPolicy::UniformGood => "good".into(),
            StartPolicy::UniformA2Plus => "a2plus".into(),
        }
    }

    pub fn sample(&self, spec: &BenchmarkSpec, rng: &mut RandomStream) -> Result<Permutation> {
        let n = spec.n();
        let jump_m = || {
            spec.jump_m()
                .ok_or_else(|| invalid(format!("start policy {:?} needs a jump benchmark", self.label())))
        };
        match self {
            StartPolicy::UniformRandom => random_permutation_uniform(n, rng),
            StartPolicy::Identity => Ok(Permutation::identity(n)),
            StartPolicy::Explicit(p) => {
                if p.size() != n {
                    return Err(Error::SizeMismatch {
                        expected: n,
                        actual: p.size(),
                    });
                }
                Ok(p.clone())
            }
            StartPolicy::UniformA2Plus => Ok(uniform_local_optimum(n, jump_m()?, rng)),
            StartPolicy::UniformGood => Ok(uniform_good_local_optimum(n, jump_m()?, rng)),
        }
    }
}

impl fmt::Display for StartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for StartPolicy {
    type Err = Error;

    /// `uniform`, `identity`, `good`, `a2plus`, or a word such as `2,1,3`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "uniform" | "random" => StartPolicy::UniformRandom,
            "identity" => StartPolicy::Identity,
            "good" => StartPolicy::UniformGood,
            "a2plus" | "local-optimum" => StartPolicy::UniformA2Plus,
            other => StartPolicy::Explicit(other.parse()?),
        })
    }
}

impl Serialize for StartPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StartPolicy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Uniform `σ` with exactly `n − m` fixed points: a uniform `m`-subset,
/// deranged uniformly (rejection from uniform shuffles).
fn uniform_local_optimum(n: usize, m: usize, rng: &mut RandomStream) -> Permutation {
    let mut scratch = SubsetScratch::default();
    let mut labels: Vec<u32> = scratch.sample(n, m, rng).to_vec();
    labels.sort_unstable();
    let mut images = labels.clone();
    loop {
        rng.shuffle(&mut images);
        if labels.iter().zip(&images).all(|(a, b)| a != b) {
            break;
        }
    }
    let mut word: Vec<u32> = (0..n as u32).collect();
    for (&from, &to) in labels.iter().zip(&images) {
        word[from as usize] = to;
    }
    Permutation::from_zero_based_unchecked(word)
}

/// Uniform good local optimum: a uniform `m`-subset in uniform order, read
/// off as consecutive transpositions, the last three forming a 3-cycle when
/// `m` is odd. Every good permutation arises from the same number of orders.
fn uniform_good_local_optimum(n: usize, m: usize, rng: &mut RandomStream) -> Permutation {
    let mut scratch = SubsetScratch::default();
    let mut order: Vec<u32> = scratch.sample(n, m, rng).to_vec();
    rng.shuffle(&mut order);
    let mut word: Vec<u32> = (0..n as u32).collect();
    let pairs_end = if m % 2 == 0 { m } else { m - 3 };
    for pair in order[..pairs_end].chunks(2) {
        word[pair[0] as usize] = pair[1];
        word[pair[1] as usize] = pair[0];
    }
    if m % 2 == 1 {
        let (a, b, c) = (order[m - 3], order[m - 2], order[m - 1]);
        word[a as usize] = b;
        word[b as usize] = c;
        word[c as usize] = a;
    }
    Permutation::from_zero_based_unchecked(word)
}

/// Outcome of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub iterations: u64,
    pub success: bool,
    pub final_fitness: FitnessValue,
    /// First iteration at which the parent lay in each region (jump only).
    pub region_entry_iterations: BTreeMap<RegionLabel, u64>,
    /// Accepted steps taken from a local optimum that changed the total
    /// number of cycles (jump only).
    pub cycle_change_events: u64,
    /// `(iteration, fitness)` at every strict improvement, starting with the
    /// initial point at iteration 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<(u64, FitnessValue)>>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub budget: u64,
    pub start: StartPolicy,
    pub record_trajectory: bool,
}

impl RunOptions {
    pub fn new(budget: u64, start: StartPolicy) -> Self {
        Self {
            budget,
            start,
            record_trajectory: false,
        }
    }
}

/// Parent state the incremental evaluation needs.
#[derive(Debug, Clone, Copy)]
struct Eval {
    fitness: FitnessValue,
    fixed: usize,
    leading: usize,
}

/// Runs the EA once. Without `start` the initial point is uniform.
pub fn run_once(
    spec: &BenchmarkSpec,
    mcfg: &MutationConfig,
    budget: u64,
    seed: u64,
    start: Option<&Permutation>,
) -> Result<RunRecord> {
    let policy = match start {
        Some(p) => StartPolicy::Explicit(p.clone()),
        None => StartPolicy::UniformRandom,
    };
    run_with(spec, mcfg, &RunOptions::new(budget, policy), seed)
}

pub fn run_with(spec: &BenchmarkSpec, mcfg: &MutationConfig, opts: &RunOptions, seed: u64) -> Result<RunRecord> {
    let mut rng = RandomStream::new(seed);
    let start = opts.start.sample(spec, &mut rng)?;
    // Fail early on lifted benchmarks without a declared optimum.
    spec.is_global_optimum(&start)?;
    Ok(Runner::new(spec, mcfg).run(start.into_zero_based(), opts, &mut rng, seed))
}

struct Runner<'a> {
    spec: &'a BenchmarkSpec,
    mutator: Mutator,
    n: usize,
    jump_m: Option<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    seen: Vec<bool>,
}

impl<'a> Runner<'a> {
    fn new(spec: &'a BenchmarkSpec, mcfg: &MutationConfig) -> Self {
        Self {
            spec,
            mutator: Mutator::new(mcfg.clone()),
            n: spec.n(),
            jump_m: spec.jump_m(),
            stamp: vec![0; spec.n()],
            epoch: 0,
            seen: Vec::new(),
        }
    }

    fn full_eval(&self, word: &[u32]) -> Eval {
        Eval {
            fitness: self.spec.evaluate_word(word),
            fixed: fixed_points(word),
            leading: leading_fixed(word, 0),
        }
    }

    fn is_optimal(&self, word: &[u32], e: &Eval) -> bool {
        match self.spec.kind() {
            BenchmarkKind::Lifted(_) => self.spec.is_optimum_word(word).unwrap_or(false),
            _ => e.fixed == self.n,
        }
    }

    /// Offspring evaluation from the parent's and the write log.
    fn child_eval(&mut self, word: &[u32], parent: &Eval, undo: &[(u32, u32)]) -> Eval {
        if let BenchmarkKind::Lifted(_) = self.spec.kind() {
            return self.full_eval(word);
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let mut fixed = parent.fixed as isize;
        let mut min_touched = usize::MAX;
        // The first log entry for a position holds the parent's value.
        for &(p, old) in undo {
            let pi = p as usize;
            if self.stamp[pi] == self.epoch {
                continue;
            }
            self.stamp[pi] = self.epoch;
            min_touched = min_touched.min(pi);
            fixed += isize::from(word[pi] as usize == pi) - isize::from(old as usize == pi);
        }
        let fixed = fixed as usize;
        let leading = if min_touched <= parent.leading {
            leading_fixed(word, min_touched)
        } else {
            parent.leading
        };
        let fitness = match self.spec.kind() {
            BenchmarkKind::PHam => fixed as i64,
            BenchmarkKind::PLeadingOnes => leading as i64,
            BenchmarkKind::PJump { m } => jump_from_fixed(self.n, *m, fixed),
            BenchmarkKind::Lifted(_) => unreachable!(),
        };
        Eval {
            fitness: FitnessValue(fitness),
            fixed,
            leading,
        }
    }

    fn run(&mut self, mut word: Vec<u32>, opts: &RunOptions, rng: &mut RandomStream, seed: u64) -> RunRecord {
        let mut parent = self.full_eval(&word);
        let mut iterations = 0u64;
        let mut regions = BTreeMap::new();
        let mut cycle_changes = 0u64;
        let mut region = self.jump_m.map(|m| RegionLabel::from_fixed_points(parent.fixed, self.n, m));
        if let Some(r) = region {
            regions.insert(r, 0);
        }
        let mut parent_cycles = if region == Some(RegionLabel::A2Plus) {
            cycle_count(&word, &mut self.seen)
        } else {
            0
        };
        let mut trajectory = opts.record_trajectory.then(|| vec![(0, parent.fitness)]);
        let mut undo: Vec<(u32, u32)> = Vec::with_capacity(64);
        let mut optimal = self.is_optimal(&word, &parent);

        while !optimal && iterations < opts.budget {
            iterations += 1;
            undo.clear();
            self.mutator.mutate_word(&mut word, rng, &mut undo);
            if undo.is_empty() {
                // Offspring equals the parent.
                continue;
            }
            let child = self.child_eval(&word, &parent, &undo);
            if child.fitness < parent.fitness {
                undo_writes(&mut word, &mut undo);
                continue;
            }
            #[cfg(debug_assertions)]
            {
                let full = self.spec.evaluate_word(&word);
                assert_eq!(full, child.fitness, "incremental evaluation drifted");
                assert!(full >= parent.fitness, "elitism violated");
            }
            if let Some(m) = self.jump_m {
                let next = RegionLabel::from_fixed_points(child.fixed, self.n, m);
                debug_assert!(
                    !(next == RegionLabel::A1 && region != Some(RegionLabel::A1)),
                    "re-entered the valley"
                );
                if region == Some(RegionLabel::A2Plus) {
                    debug_assert!(matches!(next, RegionLabel::A2Plus | RegionLabel::A3));
                    let cycles = cycle_count(&word, &mut self.seen);
                    if cycles != parent_cycles {
                        cycle_changes += 1;
                    }
                    parent_cycles = cycles;
                } else if next == RegionLabel::A2Plus {
                    parent_cycles = cycle_count(&word, &mut self.seen);
                }
                regions.entry(next).or_insert(iterations);
                region = Some(next);
            }
            if let Some(t) = trajectory.as_mut() {
                if child.fitness > parent.fitness {
                    t.push((iterations, child.fitness));
                }
            }
            parent = child;
            optimal = self.is_optimal(&word, &parent);
        }

        RunRecord {
            seed,
            iterations,
            success: optimal,
            final_fitness: parent.fitness,
            region_entry_iterations: regions,
            cycle_change_events: cycle_changes,
            trajectory,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub budget: u64,
    pub run_count: usize,
    pub master_seed: u64,
    pub start: StartPolicy,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub record_trajectory: bool,
}

/// Aggregate of independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub run_count: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Mean iterations over successful runs.
    pub mean_iterations: Option<f64>,
    /// Standard error of that mean.
    pub standard_error: Option<f64>,
    /// Some run hit the budget: the mean is biased low.
    pub censored: bool,
    pub records: Vec<RunRecord>,
}

impl BatchSummary {
    pub fn from_records(records: Vec<RunRecord>) -> Self {
        let run_count = records.len();
        let its: Vec<f64> = records
            .iter()
            .filter(|r| r.success)
            .map(|r| r.iterations as f64)
            .collect();
        let successes = its.len();
        let (mean, se) = mean_and_se(&its);
        BatchSummary {
            run_count,
            successes,
            success_rate: if run_count == 0 {
                0.0
            } else {
                successes as f64 / run_count as f64
            },
            mean_iterations: mean,
            standard_error: se,
            censored: successes < run_count,
            records,
        }
    }
}

/// Sample mean and standard error (`s/√k`), summed in slice order.
pub fn mean_and_se(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (Some(mean), None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (Some(mean), Some((var / k).sqrt()))
}

/// Runs `run_count` independent runs; run `i` uses
/// [`derive_seed`]`(master_seed, i)`. Results are identical for any thread
/// count.
pub fn run_batch(spec: &BenchmarkSpec, mcfg: &MutationConfig, opts: &BatchOptions) -> Result<BatchSummary> {
    if opts.run_count == 0 {
        return Err(invalid("run_count must be at least 1"));
    }
    let run_opts = RunOptions {
        budget: opts.budget,
        start: opts.start.clone(),
        record_trajectory: opts.record_trajectory,
    };
    let job = || -> Result<Vec<RunRecord>> {
        (0..opts.run_count as u64)
            .into_par_iter()
            .map(|i| run_with(spec, mcfg, &run_opts, derive_seed(opts.master_seed, i)))
            .collect()
    };
    let records = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?
            .install(job)?,
        None => job()?,
    };
    Ok(BatchSummary::from_records(records))
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Order of the expected runtime for this benchmark and operator, without
/// constant factors: `n² ln n` (PHam), `n³` (PLeadingOnes), and for the jump
/// benchmark `n² ln n` plus `n^{2⌈m/2⌉}` (swap), `(m!)² C(n,m)` (Poisson
/// scramble) or `m^β m! C(n,m)` (power-law scramble). Lifted benchmarks use
/// `n³`.
pub fn theoretical_order(spec: &BenchmarkSpec, mcfg: &MutationConfig) -> f64 {
    let n = spec.n() as f64;
    let n2logn = n * n * n.ln().max(1.0);
    match spec.kind() {
        BenchmarkKind::PHam => n2logn,
        BenchmarkKind::PLeadingOnes | BenchmarkKind::Lifted(_) => n * n * n,
        BenchmarkKind::PJump { m } => {
            let m = *m;
            let plateau = match (mcfg.operator, &mcfg.counts) {
                (Operator::Swap, _) => n.powi(2 * m.div_ceil(2) as i32),
                (Operator::Scramble, CountDistribution::Poisson { .. }) => {
                    factorial_f64(m).powi(2) * binomial_f64(spec.n(), m)
                }
                (Operator::Scramble, CountDistribution::PowerLaw(pl)) => {
                    (m as f64).powf(pl.beta()) * factorial_f64(m) * binomial_f64(spec.n(), m)
                }
            };
            n2logn + plateau
        }
    }
}

/// Default budget: `factor ×` [`theoretical_order`], rounded up.
pub fn theory_budget(spec: &BenchmarkSpec, mcfg: &MutationConfig, factor: f64) -> Result<u64> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(invalid(format!("budget factor must be positive, got {factor}")));
    }
    let b = (factor * theoretical_order(spec, mcfg)).ceil();
    if !(b.is_finite() && b < 1e18) {
        return Err(invalid(format!("budget {b} for {} is not representable", spec.key())));
    }
    Ok(b as u64)
}

pub const DEFAULT_BUDGET_FACTOR: f64 = 50.0;
