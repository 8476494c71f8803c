//! Acceptance checks, one line per criterion. Exits non-zero if any fails.
//! Pass criterion numbers as arguments to run a subset.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use permubench_cli::config::{BenchmarkTemplate, BudgetRule, SweepPlan, TemplateKind};
use permubench_cli::fit::fit_exponent;
use permubench_cli::verify::{check_dec, check_good, check_leainc, check_spl, jump_estimate, LemmaReport, VerifySettings};
use permubench_cli::{run_sweep, CellResult};
use permubench_core::oracles::{
    ea_hitting_time_exact, one_step_jump_probability_exact, same_cycle_probability_brute,
    same_cycle_probability_exact, scramble_exact_subset_term, CycleType, ExpLinear,
};
use permubench_core::{
    cycle_decomposition, derive_seed, fixed_point_count, mutate, poisson_sample, random_permutation_uniform,
    run_batch, BatchOptions, BenchmarkSpec, CountSpec, MutationConfig, MutationSpec, Operator, Permutation,
    PowerLaw, RandomStream, StartPolicy,
};

const MASTER_SEED: u64 = 0x5EED_0001;

fn seed(criterion: u64) -> u64 {
    derive_seed(MASTER_SEED, criterion)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn lemma_outcome(rep: &LemmaReport) -> Result<Outcome> {
    if let Some(why) = &rep.skipped {
        bail!("skipped: {why}");
    }
    let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.pass).map(|c| c.case.as_str()).collect();
    let tightest = rep
        .checks
        .iter()
        .filter_map(|c| c.margin.map(|m| (m, c.case.as_str())))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let detail = match tightest {
        Some((m, case)) => format!(
            "{} checks, {} failed; smallest margin {m:.3e} at {case}",
            rep.checks.len(),
            failed.len()
        ),
        None => format!("{} checks, {} failed", rep.checks.len(), failed.len()),
    };
    outcome(failed.is_empty() && !rep.checks.is_empty(), detail)
}

fn swap_spec() -> MutationSpec {
    MutationSpec {
        operator: Operator::Swap,
        counts: CountSpec::Poisson { lambda: 1.0 },
        plus_one: false,
    }
}

fn scramble_spec(counts: CountSpec) -> MutationSpec {
    MutationSpec {
        operator: Operator::Scramble,
        counts,
        plus_one: false,
    }
}

fn sweep(
    kind: TemplateKind,
    m: Option<usize>,
    n_values: Vec<usize>,
    mutations: Vec<MutationSpec>,
    runs: usize,
    start: StartPolicy,
    criterion: u64,
) -> Result<Vec<CellResult>> {
    let plan = SweepPlan {
        benchmark: BenchmarkTemplate { kind, m },
        n_values,
        mutations,
        runs_per_cell: runs,
        budget: BudgetRule::default(),
        master_seed: seed(criterion),
        start,
    };
    plan.validate()?;
    run_sweep(&plan, None, |_| Ok(()))
}

fn mean_of(c: &CellResult) -> Result<f64> {
    if c.summary.success_rate < 1.0 {
        bail!(
            "{} {}: only {}/{} runs reached the optimum",
            c.cell.spec.key(),
            c.cell.mutation.label(),
            c.summary.successes,
            c.summary.run_count
        );
    }
    c.summary.mean_iterations.context("no successful runs")
}

fn exponent_of(cells: &[&CellResult]) -> Result<f64> {
    let pts = cells
        .iter()
        .map(|c| Ok((c.cell.spec.n() as f64, mean_of(c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(fit_exponent(&pts)?.exponent)
}

fn c1_same_cycle() -> Result<Outcome> {
    let rep = check_spl(7);
    let mut exhaustive = 0usize;
    let mut mismatches = 0usize;
    for n in 2..=7 {
        for p in Permutation::all(n) {
            exhaustive += 1;
            let exact = same_cycle_probability_exact(&CycleType::of(&p))?;
            if exact.exact != same_cycle_probability_brute(&p)? || exact.exact > exact.bound {
                mismatches += 1;
            }
        }
    }
    let base = lemma_outcome(&rep)?;
    outcome(
        base.pass && mismatches == 0,
        format!("{}; every permutation n <= 7 ({exhaustive}): {mismatches} mismatches", base.detail),
    )
}

fn c2_leainc() -> Result<Outcome> {
    lemma_outcome(&check_leainc(&VerifySettings::new(seed(2), 1_000_000)))
}

fn c3_dec() -> Result<Outcome> {
    lemma_outcome(&check_dec(&VerifySettings::new(seed(3), 1_000_000)))
}

fn c4_good() -> Result<Outcome> {
    lemma_outcome(&check_good(7))
}

fn c5_hitting() -> Result<Outcome> {
    let cfg = MutationConfig::swap();
    let mut parts = Vec::new();
    let mut pass = true;
    for (i, spec) in [BenchmarkSpec::p_jump(4, 3)?, BenchmarkSpec::p_ham(5)?].into_iter().enumerate() {
        let exact = ea_hitting_time_exact(&spec, &cfg, &StartPolicy::UniformRandom)?;
        let batch = run_batch(
            &spec,
            &cfg,
            &BatchOptions {
                budget: 10_000_000,
                run_count: 10_000,
                master_seed: derive_seed(seed(5), i as u64),
                start: StartPolicy::UniformRandom,
                threads: None,
                record_trajectory: false,
            },
        )?;
        let mean = batch.mean_iterations.context("no successes")?;
        let se = batch.standard_error.context("no spread")?;
        let z = (mean - exact.expected) / se;
        pass &= batch.success_rate == 1.0 && z.abs() <= 3.0;
        parts.push(format!("{}: exact {:.4}, engine {mean:.4} ± {se:.4} (z = {z:+.2})", spec.key(), exact.expected));
    }
    outcome(pass, parts.join("; "))
}

fn c6_scramble_jump() -> Result<Outcome> {
    let (n, m) = (5, 3);
    let cfg = MutationConfig::scramble();
    let map = one_step_jump_probability_exact(n, m, &cfg)?;
    let exact = map.values().next().context("no local optima")?;
    let term_ok = scramble_exact_subset_term(n, m) == ExpLinear::inv_e_fraction(1, 360);
    // Equality across cycle types, also where there is more than one type.
    let mut equal = true;
    for (n2, m2) in [(5, 3), (7, 4), (7, 5), (12, 6)] {
        let vals: Vec<_> = one_step_jump_probability_exact(n2, m2, &cfg)?
            .into_values()
            .map(|j| j.exact)
            .collect();
        equal &= vals.iter().all(Option::is_some) && vals.windows(2).all(|w| w[0] == w[1]);
    }
    let spec = BenchmarkSpec::p_jump(n, m)?;
    let mut rng = RandomStream::new(seed(6));
    let sigma = StartPolicy::UniformA2Plus.sample(&spec, &mut rng)?;
    let est = jump_estimate(&sigma, &cfg, 10_000_000, &mut rng);
    let z = (est.p - exact.value) / est.se;
    outcome(
        term_ok && equal && z.abs() <= 3.0,
        format!(
            "exact {:.6e} = {}; sampled {:.6e} ± {:.1e} from {sigma} (z = {z:+.2}); k=3 term 1/(360e): {term_ok}; equal across types: {equal}",
            exact.value,
            exact.exact.as_ref().map_or("-".into(), |e| e.to_string()),
            est.p,
            est.se
        ),
    )
}

fn c7_leading_ones() -> Result<Outcome> {
    let cells = sweep(
        TemplateKind::PLeadingOnes,
        None,
        vec![16, 24, 32, 48, 64],
        vec![swap_spec()],
        200,
        StartPolicy::UniformRandom,
        7,
    )?;
    let e = exponent_of(&cells.iter().collect::<Vec<_>>())?;
    outcome((2.6..=3.4).contains(&e), format!("exponent {e:.3}, window [2.6, 3.4]"))
}

fn c8_ham() -> Result<Outcome> {
    let cells = sweep(
        TemplateKind::PHam,
        None,
        vec![16, 32, 64, 128],
        vec![swap_spec()],
        200,
        StartPolicy::UniformRandom,
        8,
    )?;
    let ratios = cells
        .iter()
        .map(|c| {
            let n = c.cell.spec.n() as f64;
            Ok(mean_of(c)? / (n * n * n.ln()))
        })
        .collect::<Result<Vec<f64>>>()?;
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    outcome(
        hi / lo <= 2.5,
        format!("mean/(n² ln n) = [{}], max/min {:.3} (limit 2.5)", shown.join(", "), hi / lo),
    )
}

fn c9_jump_operators() -> Result<Outcome> {
    let cells = sweep(
        TemplateKind::PJump,
        Some(3),
        vec![8, 10, 12, 14, 16],
        vec![swap_spec(), scramble_spec(CountSpec::Poisson { lambda: 1.0 })],
        300,
        StartPolicy::UniformA2Plus,
        9,
    )?;
    let (swap, scramble): (Vec<&CellResult>, Vec<&CellResult>) =
        cells.iter().partition(|c| c.cell.mutation.operator == Operator::Swap);
    let es = exponent_of(&swap)?;
    let ec = exponent_of(&scramble)?;
    let ms = mean_of(swap.last().context("no cells")?)?;
    let mc = mean_of(scramble.last().context("no cells")?)?;
    let parts = [(3.5..=4.5).contains(&es), (2.5..=3.5).contains(&ec), mc < ms];
    outcome(
        parts.iter().all(|&b| b),
        format!(
            "swap exponent {es:.3} in [3.5, 4.5]: {}; scramble exponent {ec:.3} in [2.5, 3.5]: {}; at n=16 scramble mean {mc:.0} < swap mean {ms:.0}: {}",
            parts[0], parts[1], parts[2]
        ),
    )
}

fn c10_heavy_tail() -> Result<Outcome> {
    let cells = sweep(
        TemplateKind::PJump,
        Some(4),
        vec![12],
        vec![
            scramble_spec(CountSpec::Poisson { lambda: 1.0 }),
            scramble_spec(CountSpec::PowerLaw { beta: 1.5, u: None }),
        ],
        300,
        StartPolicy::UniformA2Plus,
        10,
    )?;
    let poisson = mean_of(&cells[0])?;
    let heavy = mean_of(&cells[1])?;
    outcome(
        heavy <= poisson / 1.5,
        format!("heavy-tailed {heavy:.0} vs Poisson {poisson:.0}: speed-up {:.2}x (need >= 1.5x)", poisson / heavy),
    )
}

fn c11_samplers() -> Result<Outcome> {
    let draws = 1_000_000u64;
    let mut rng = RandomStream::new(seed(11));
    let mut counts = [0u64; 9];
    let (mut m2, mut m3) = (0.0f64, 0.0f64);
    for _ in 0..draws {
        let k = poisson_sample(1.0, &mut rng)?;
        if k < counts.len() {
            counts[k] += 1;
        }
        m2 += (k * k) as f64;
        m3 += (k * k * k) as f64;
    }
    let mut worst_z = 0.0f64;
    let mut fact = 1.0;
    for (k, &c) in counts.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        let p = (-1.0f64).exp() / fact;
        let se = (p * (1.0 - p) / draws as f64).sqrt();
        worst_z = worst_z.max(((c as f64 / draws as f64) - p).abs() / se);
    }
    let (m2, m3) = (m2 / draws as f64, m3 / draws as f64);
    let (e2, e3) = ((m2 - 2.0).abs() / 2.0, (m3 - 5.0).abs() / 5.0);

    let pl = PowerLaw::new(1.5, 100)?;
    let mut hist = vec![0u64; 101];
    for _ in 0..draws {
        hist[pl.sample(&mut rng)] += 1;
    }
    let tv: f64 = 0.5
        * (1..=100)
            .map(|k| (hist[k] as f64 / draws as f64 - pl.pmf(k)).abs())
            .sum::<f64>();
    outcome(
        worst_z <= 3.0 && e2 <= 0.01 && e3 <= 0.02 && tv < 0.005,
        format!(
            "Poisson pmf worst |z| {worst_z:.2} (<= 3); E[X²] {m2:.4} ({:.2}%), E[X³] {m3:.4} ({:.2}%); power-law TV {tv:.4} (< 0.005)",
            100.0 * e2,
            100.0 * e3
        ),
    )
}

fn c12_structure() -> Result<Outcome> {
    let mut rng = RandomStream::new(seed(12));
    let cfgs = [
        MutationConfig::swap(),
        MutationConfig::scramble(),
        MutationConfig::heavy_tailed_scramble(1.5, 40)?,
    ];
    let mut invalid = 0u64;
    for cfg in &cfgs {
        let mut sigma = random_permutation_uniform(40, &mut rng)?;
        for _ in 0..1_000_000 {
            let child = mutate(&sigma, cfg, &mut rng);
            if Permutation::from_zero_based(child.as_zero_based().to_vec()).is_err() {
                invalid += 1;
            }
            sigma = child;
        }
    }
    let mut round_trip_failures = 0u64;
    let mut n_minus_one = 0u64;
    for n in 1..=7 {
        for p in Permutation::all(n) {
            round_trip_failures += u64::from(cycle_decomposition(&p).rebuild()? != p);
            n_minus_one += u64::from(fixed_point_count(&p) + 1 == n);
        }
    }
    // The engine re-evaluates every accepted offspring from scratch and
    // asserts it is not worse when debug assertions are on; a violation
    // aborts the run (and this suite). Trajectories give a second look.
    let spec = BenchmarkSpec::p_jump(10, 3)?;
    let batch = run_batch(
        &spec,
        &MutationConfig::swap(),
        &BatchOptions {
            budget: 200_000,
            run_count: 200,
            master_seed: seed(1200),
            start: StartPolicy::UniformRandom,
            threads: None,
            record_trajectory: true,
        },
    )?;
    let monotone = batch.records.iter().all(|r| {
        let t = r.trajectory.as_deref().unwrap_or(&[]);
        t.windows(2).all(|w| w[0].1 < w[1].1 && w[0].0 < w[1].0) && t.last().map(|l| l.1) == Some(r.final_fitness)
    });
    outcome(
        invalid == 0 && round_trip_failures == 0 && n_minus_one == 0 && monotone,
        format!(
            "3x10^6 mutations: {invalid} invalid; round trip n <= 7: {round_trip_failures} failures; g = n-1: {n_minus_one}; trajectories monotone: {monotone}; engine assertions {}",
            if cfg!(debug_assertions) { "on" } else { "off" }
        ),
    )
}

const DETERMINISM_PLAN: &str = r#"
master_seed = 77
runs_per_cell = 60
n_values = [6, 8, 10]
start = "uniform"

[benchmark]
kind = "pjump"
m = 3

[[mutations]]
operator = "swap"
counts = { kind = "poisson", lambda = 1.0 }

[[mutations]]
operator = "scramble"
counts = { kind = "powerlaw", beta = 1.5 }
"#;

fn run_cli(plan: &Path, out: &Path, threads: usize) -> Result<()> {
    let status = Command::new(env!("CARGO_BIN_EXE_permubench"))
        .args(["sweep", "--config"])
        .arg(plan)
        .arg("--out-dir")
        .arg(out)
        .args(["--threads", &threads.to_string(), "--no-timestamp"])
        .stderr(std::process::Stdio::null())
        .status()?;
    if !status.success() {
        bail!("permubench sweep exited with {status}");
    }
    Ok(())
}

fn c13_determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let plan = dir.path().join("plan.toml");
    std::fs::write(&plan, DETERMINISM_PLAN)?;
    let runs = [(1, "a"), (1, "b"), (4, "c")];
    for (threads, name) in runs {
        run_cli(&plan, &dir.path().join(name), threads)?;
    }
    let mut same = true;
    let mut rows = 0;
    for file in ["runs.csv", "cells.csv", "fits.csv"] {
        let a = std::fs::read(dir.path().join("a").join(file))?;
        for other in ["b", "c"] {
            same &= a == std::fs::read(dir.path().join(other).join(file))?;
        }
        if file == "runs.csv" {
            rows = a.iter().filter(|&&b| b == b'\n').count() - 1;
        }
    }
    outcome(
        same && rows == 360,
        format!("{rows} run rows; runs/cells/fits byte-identical across repeats and 1 vs 4 threads: {same}"),
    )
}

type Criterion = (u64, &'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "same-cycle probability, exact vs enumeration", c1_same_cycle),
        (2, "PLeadingOnes improvement bound", c2_leainc),
        (3, "plateau cycle-change bound", c3_dec),
        (4, "distance to a good local optimum", c4_good),
        (5, "exact vs empirical hitting time", c5_hitting),
        (6, "scramble one-step jump probability", c6_scramble_jump),
        (7, "PLeadingOnes scaling", c7_leading_ones),
        (8, "PHam scaling", c8_ham),
        (9, "PJump m=3 swap vs scramble", c9_jump_operators),
        (10, "heavy-tailed scramble speed-up", c10_heavy_tail),
        (11, "sampler fidelity", c11_samplers),
        (12, "structural invariants", c12_structure),
        (13, "determinism of sweeps", c13_determinism),
    ];
    let selected: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        ran += 1;
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} [{id:>2}] {name}: {detail} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
