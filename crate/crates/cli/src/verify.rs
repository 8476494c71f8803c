//! Checks of the probability statements behind the runtime bounds.

use std::fmt;

use permubench_core::oracles::{
    cycle_change_probability_estimate, good_distance_table, improvement_probability_estimate,
    one_step_jump_probability_exact, same_cycle_probability_brute, same_cycle_probability_exact,
    scramble_exact_subset_term, CycleType, Estimate, ExpLinear,
};
use permubench_core::{
    derive_seed, random_permutation_uniform, BenchmarkSpec, MutationConfig, Mutator, Permutation, RandomStream,
    StartPolicy,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Lemma {
    /// Same-cycle probability of a uniform transposition.
    Spl,
    /// Improvement probability on PLeadingOnes.
    Leainc,
    /// Cycle-count change probability on the jump plateau.
    Dec,
    /// Distance from a local optimum to a good one.
    Good,
    /// One-step jump probability of scramble.
    Scramb,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [Lemma::Spl, Lemma::Leainc, Lemma::Dec, Lemma::Good, Lemma::Scramb];

    pub fn claim(self) -> &'static str {
        match self {
            Lemma::Spl => "P(both labels of a uniform transposition share a cycle) = sum c(c-1)/(n(n-1)) <= (n-r)(n-r+1)/(n(n-1))",
            Lemma::Leainc => "P(strict improvement on PLeadingOnes) <= 6/(n-1)^2",
            Lemma::Dec => "P(accepted step from a local optimum changes the cycle count) <= 3(m/(n-1))^2",
            Lemma::Good => "every local optimum is within floor(m/2) transpositions of a good one",
            Lemma::Scramb => "scramble jumps from every local optimum with one exact probability",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::Spl => "spl",
            Lemma::Leainc => "leainc",
            Lemma::Dec => "dec",
            Lemma::Good => "good",
            Lemma::Scramb => "scramb",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub case: String,
    pub value: String,
    pub bound: String,
    /// `bound − value` where both are numbers.
    pub margin: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub claim: &'static str,
    pub checks: Vec<Check>,
    pub skipped: Option<String>,
}

impl LemmaReport {
    fn new(lemma: Lemma) -> Self {
        Self {
            lemma,
            claim: lemma.claim(),
            checks: Vec::new(),
            skipped: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push_upper(&mut self, case: String, est: &Estimate, bound: f64) {
        let upper = est.upper(3.0);
        self.checks.push(Check {
            case,
            value: format!("{:.3e} + 3*{:.1e}", est.p, est.se),
            bound: format!("{bound:.4e}"),
            margin: Some(bound - upper),
            pass: upper <= bound,
        });
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", self.lemma, self.claim)?;
        if let Some(why) = &self.skipped {
            return writeln!(f, "  SKIPPED: {why}");
        }
        for c in &self.checks {
            let margin = c.margin.map(|m| format!("{m:+.3e}")).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "  {:<4} {:<34} value {:<26} bound {:<14} margin {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.case,
                c.value,
                c.bound,
                margin
            )?;
        }
        Ok(())
    }
}

/// Sizes and sample counts for the sampling checks.
#[derive(Debug, Clone)]
pub struct VerifySettings {
    pub seed: u64,
    /// Mutations sampled per state (or in total for `scramb`).
    pub samples: u64,
    pub states_per_case: usize,
    pub leainc_sizes: Vec<usize>,
    pub dec_cases: Vec<(usize, usize)>,
}

impl VerifySettings {
    pub fn new(seed: u64, samples: u64) -> Self {
        Self {
            seed,
            samples,
            states_per_case: 10,
            leainc_sizes: vec![5, 10, 20],
            dec_cases: vec![(20, 3), (20, 4), (40, 3)],
        }
    }
}

pub fn verify_lemmas(selection: &[Lemma], settings: &VerifySettings) -> Vec<LemmaReport> {
    selection
        .iter()
        .map(|&l| match l {
            Lemma::Spl => check_spl(7),
            Lemma::Leainc => check_leainc(settings),
            Lemma::Dec => check_dec(settings),
            Lemma::Good => check_good(7),
            Lemma::Scramb => check_scramb(settings),
        })
        .collect()
}

pub fn check_spl(max_n: usize) -> LemmaReport {
    let mut rep = LemmaReport::new(Lemma::Spl);
    for n in 2..=max_n {
        for ct in CycleType::all(n) {
            let case = format!("n={n} type {ct}");
            let (exact, brute) = match (
                same_cycle_probability_exact(&ct),
                same_cycle_probability_brute(&ct.representative()),
            ) {
                (Ok(e), Ok(b)) => (e, b),
                (Err(e), _) | (_, Err(e)) => {
                    rep.checks.push(Check {
                        case,
                        value: e.to_string(),
                        bound: "-".into(),
                        margin: None,
                        pass: false,
                    });
                    continue;
                }
            };
            rep.checks.push(Check {
                case,
                value: format!("{} (brute {})", exact.exact, brute),
                bound: exact.bound.to_string(),
                margin: Some(exact.margin()),
                pass: exact.exact == brute && exact.exact <= exact.bound,
            });
        }
    }
    rep
}

fn random_non_optimal(n: usize, rng: &mut RandomStream) -> Permutation {
    loop {
        let p = random_permutation_uniform(n, rng).expect("n >= 1");
        if !p.is_identity() {
            return p;
        }
    }
}

pub fn check_leainc(s: &VerifySettings) -> LemmaReport {
    let mut rep = LemmaReport::new(Lemma::Leainc);
    if s.samples == 0 {
        rep.skipped = Some("sample budget is zero".into());
        return rep;
    }
    let cfg = MutationConfig::swap();
    for (ci, &n) in s.leainc_sizes.iter().enumerate() {
        let spec = BenchmarkSpec::p_leading_ones(n).expect("n >= 1");
        let bound = 6.0 / ((n - 1) as f64).powi(2);
        let mut rng = RandomStream::new(derive_seed(s.seed, ci as u64));
        for k in 0..s.states_per_case {
            let sigma = random_non_optimal(n, &mut rng);
            let est = improvement_probability_estimate(&spec, &sigma, &cfg, s.samples, &mut rng).expect("samples >= 1");
            rep.push_upper(format!("n={n} state {k}"), &est, bound);
        }
    }
    rep
}

pub fn check_dec(s: &VerifySettings) -> LemmaReport {
    let mut rep = LemmaReport::new(Lemma::Dec);
    if s.samples == 0 {
        rep.skipped = Some("sample budget is zero".into());
        return rep;
    }
    let cfg = MutationConfig::swap();
    for (ci, &(n, m)) in s.dec_cases.iter().enumerate() {
        let spec = match BenchmarkSpec::p_jump(n, m) {
            Ok(spec) => spec,
            Err(e) => {
                rep.checks.push(Check {
                    case: format!("n={n} m={m}"),
                    value: e.to_string(),
                    bound: "-".into(),
                    margin: None,
                    pass: false,
                });
                continue;
            }
        };
        let bound = 3.0 * (m as f64 / (n - 1) as f64).powi(2);
        let mut rng = RandomStream::new(derive_seed(s.seed, 100 + ci as u64));
        for k in 0..s.states_per_case {
            let sigma = StartPolicy::UniformA2Plus.sample(&spec, &mut rng).expect("jump spec");
            let est = cycle_change_probability_estimate(&sigma, m, &cfg, s.samples, &mut rng).expect("local optimum");
            rep.push_upper(format!("n={n} m={m} state {k}"), &est, bound);
        }
    }
    rep
}

pub fn check_good(max_n: usize) -> LemmaReport {
    let mut rep = LemmaReport::new(Lemma::Good);
    for m in 3..=5 {
        for n in m..=max_n {
            let table = match good_distance_table(n, m) {
                Ok(t) => t,
                Err(e) => {
                    rep.checks.push(Check {
                        case: format!("n={n} m={m}"),
                        value: e.to_string(),
                        bound: "-".into(),
                        margin: None,
                        pass: false,
                    });
                    continue;
                }
            };
            let limit = (m / 2) as u32;
            let (mut states, mut worst, mut over) = (0usize, 0u32, 0usize);
            for p in Permutation::all(n).filter(|p| p.fixed_point_count() + m == n) {
                let d = table[p.lex_rank()];
                states += 1;
                worst = worst.max(d);
                over += usize::from(d > limit);
            }
            rep.checks.push(Check {
                case: format!("n={n} m={m} ({states} local optima)"),
                value: format!("max {worst}, {over} over"),
                bound: limit.to_string(),
                margin: Some(limit as f64 - worst as f64),
                pass: over == 0,
            });
        }
    }
    rep
}

pub fn check_scramb(s: &VerifySettings) -> LemmaReport {
    let (n, m) = (5, 3);
    let mut rep = LemmaReport::new(Lemma::Scramb);
    let cfg = MutationConfig::scramble();
    let map = match one_step_jump_probability_exact(n, m, &cfg) {
        Ok(map) => map,
        Err(e) => {
            rep.skipped = Some(e.to_string());
            return rep;
        }
    };
    let values: Vec<_> = map.values().map(|j| j.exact.clone()).collect();
    let same = values.windows(2).all(|w| w[0] == w[1]) && values.iter().all(Option::is_some);
    rep.checks.push(Check {
        case: format!("n={n} m={m}: {} cycle types", values.len()),
        value: if same { "all equal".into() } else { "differ".into() },
        bound: "equal".into(),
        margin: None,
        pass: same,
    });
    let term = scramble_exact_subset_term(n, m);
    let term_ok = term == ExpLinear::inv_e_fraction(1, 360);
    rep.checks.push(Check {
        case: "k=3 term".into(),
        value: term.to_string(),
        bound: "(1/360)/e".into(),
        margin: Some(term.to_f64() - 1.0 / (360.0 * std::f64::consts::E)),
        pass: term_ok,
    });
    if s.samples == 0 {
        return rep;
    }
    let exact = map.values().next().map(|j| j.value).unwrap_or(f64::NAN);
    let spec = BenchmarkSpec::p_jump(n, m).expect("valid");
    let mut rng = RandomStream::new(derive_seed(s.seed, 200));
    let sigma = StartPolicy::UniformA2Plus.sample(&spec, &mut rng).expect("jump spec");
    let est = jump_estimate(&sigma, &cfg, s.samples, &mut rng);
    let diff = (est.p - exact).abs();
    rep.checks.push(Check {
        case: format!("sampled from {sigma}"),
        value: format!("{:.5e} +- {:.1e}", est.p, est.se),
        bound: format!("{exact:.5e} within 3 SE"),
        margin: Some(3.0 * est.se - diff),
        pass: diff <= 3.0 * est.se,
    });
    rep
}

/// Fraction of mutations of `σ` that land on the identity.
pub fn jump_estimate(sigma: &Permutation, cfg: &MutationConfig, samples: u64, rng: &mut RandomStream) -> Estimate {
    let mut mutator = Mutator::new(cfg.clone());
    let mut word = sigma.as_zero_based().to_vec();
    let parent = word.clone();
    let mut undo = Vec::new();
    let mut hits = 0;
    for _ in 0..samples {
        mutator.mutate_word(&mut word, rng, &mut undo);
        hits += u64::from(word.iter().enumerate().all(|(i, &v)| i as u32 == v));
        word.copy_from_slice(&parent);
        undo.clear();
    }
    Estimate::from_counts(hits, samples)
}

