//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use permubench_core::oracles::ea_hitting_time_exact;
use permubench_core::{CountSpec, MutationSpec, Operator, StartPolicy};

use crate::config::{BenchmarkTemplate, BudgetRule, SweepPlan, TemplateKind};
use crate::fit::DEFAULT_SUCCESS_FLOOR;
use crate::report::{emit_report, fit_groups, read_runs, Format, ReportOptions, RunCsvWriter};
use crate::sweep::{run_sweep, CellResult, RunRow};
use crate::verify::{verify_lemmas, Lemma, VerifySettings};

#[derive(Debug, Parser)]
#[command(name = "permubench", version, about = "Permutation (1+1) EA experiments")]
pub struct Cli {
    /// Master seed; overrides the one in a sweep plan.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for runs inside a cell.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write run table and report here instead of stdout
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    /// Leave out the `# generated at` line of CSV outputs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one batch of independent runs.
    Run(RunArgs),
    /// Run every cell of a sweep plan.
    Sweep {
        /// TOML sweep plan
        #[arg(long)]
        config: PathBuf,
    },
    /// Fit runtime exponents to a run table.
    Fit {
        /// Run table written by `run` or `sweep`
        #[arg(long)]
        input: PathBuf,
        /// Minimum success rate for a size to enter the fit.
        #[arg(long, default_value_t = DEFAULT_SUCCESS_FLOOR)]
        floor: f64,
    },
    /// Check the lemma-level probability statements.
    Verify {
        /// Repeat to select several; all when absent.
        #[arg(long, value_enum)]
        lemma: Vec<Lemma>,
        /// Mutations sampled per state.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Exact expected runtime for n <= 7.
    ExactHitting(ProblemArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// `pham`, `pleadingones` or `pjump`
    #[arg(long, value_parser = parse_kind)]
    pub benchmark: TemplateKind,
    #[arg(long)]
    pub n: usize,
    /// Jump parameter, required for `pjump`
    #[arg(long)]
    pub m: Option<usize>,
    /// `swap` or `scramble`
    #[arg(long, value_parser = parse_operator, default_value = "swap")]
    pub operator: Operator,
    /// `poisson:1`, `powerlaw:1.5` (range n) or `powerlaw:1.5:10`.
    #[arg(long, default_value = "poisson:1")]
    pub counts: CountSpec,
    /// Swap only: one extra transposition per mutation.
    #[arg(long)]
    pub plus_one: bool,
    /// `uniform`, `identity`, `good`, `a2plus` or a word such as `2,1,3`.
    #[arg(long, default_value = "uniform")]
    pub start: StartPolicy,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 100)]
    pub runs: usize,
    /// Fixed iteration budget per run.
    #[arg(long, conflicts_with = "budget_factor")]
    pub budget: Option<u64>,
    /// Budget as a multiple of the theoretical order.
    #[arg(long)]
    pub budget_factor: Option<f64>,
}

fn parse_kind(s: &str) -> Result<TemplateKind, String> {
    match s {
        "pham" => Ok(TemplateKind::PHam),
        "pleadingones" => Ok(TemplateKind::PLeadingOnes),
        "pjump" => Ok(TemplateKind::PJump),
        _ => Err(format!("unknown benchmark {s:?} (pham, pleadingones, pjump)")),
    }
}

fn parse_operator(s: &str) -> Result<Operator, String> {
    match s {
        "swap" => Ok(Operator::Swap),
        "scramble" => Ok(Operator::Scramble),
        _ => Err(format!("unknown operator {s:?} (swap, scramble)")),
    }
}

impl ProblemArgs {
    fn template(&self) -> BenchmarkTemplate {
        BenchmarkTemplate {
            kind: self.benchmark,
            m: self.m,
        }
    }

    fn mutation(&self) -> MutationSpec {
        MutationSpec {
            operator: self.operator,
            counts: self.counts.clone(),
            plus_one: self.plus_one,
        }
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let report_opts = ReportOptions {
        format: cli.format,
        timestamp: !cli.no_timestamp,
        floor: DEFAULT_SUCCESS_FLOOR,
    };
    match &cli.command {
        Command::Run(args) => {
            let p = &args.problem;
            let plan = SweepPlan {
                benchmark: p.template(),
                n_values: vec![p.n],
                mutations: vec![p.mutation()],
                runs_per_cell: args.runs,
                budget: match (args.budget, args.budget_factor) {
                    (Some(iterations), _) => BudgetRule::Fixed { iterations },
                    (None, Some(factor)) => BudgetRule::Theory { factor },
                    (None, None) => BudgetRule::default(),
                },
                master_seed: cli.seed.unwrap_or(0),
                start: p.start.clone(),
            };
            plan.validate()?;
            execute_plan(&plan, &cli, &report_opts)
        }
        Command::Sweep { config } => {
            let mut plan = SweepPlan::load(config)?;
            if let Some(seed) = cli.seed {
                plan.master_seed = seed;
            }
            execute_plan(&plan, &cli, &report_opts)
        }
        Command::Fit { input, floor } => {
            let rows = read_runs(input)?;
            let fits = fit_groups(&rows, *floor);
            let mut out = std::io::stdout().lock();
            for g in &fits {
                match &g.fit {
                    Some(f) => writeln!(
                        out,
                        "{} m={} {} {}: exponent {:.4} +- {:.4} over {} sizes",
                        g.group.benchmark,
                        g.group.m.map_or("-".into(), |m| m.to_string()),
                        g.group.operator,
                        g.group.counts,
                        f.exponent,
                        f.slope_se,
                        f.points.len()
                    )?,
                    None => writeln!(
                        out,
                        "{} {} {}: no fit ({})",
                        g.group.benchmark,
                        g.group.operator,
                        g.group.counts,
                        g.skipped.as_deref().unwrap_or("")
                    )?,
                }
            }
            if let Some(dir) = &cli.out_dir {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("fits.json");
                std::fs::write(&path, serde_json::to_string_pretty(&fits)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { lemma, samples } => {
            let selection: Vec<Lemma> = if lemma.is_empty() { Lemma::ALL.to_vec() } else { lemma.clone() };
            if *samples == 0 {
                eprintln!("warning: --samples 0 skips the sampling checks");
            }
            let reports = verify_lemmas(&selection, &VerifySettings::new(cli.seed.unwrap_or(0), *samples));
            let ok = reports.iter().all(|r| r.passed());
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&reports)?),
                Format::Csv => {
                    for r in &reports {
                        print!("{r}");
                    }
                }
            }
            if let Some(dir) = &cli.out_dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("verify.json"), serde_json::to_string_pretty(&reports)? + "\n")?;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::ExactHitting(p) => {
            let spec = p.template().instantiate(p.n)?;
            let mcfg = p.mutation().resolve(p.n)?;
            let h = ea_hitting_time_exact(&spec, &mcfg, &p.start)?;
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::json!({
                        "benchmark": spec,
                        "mutation": p.mutation().label(),
                        "start": p.start.label(),
                        "expected_iterations": h.expected,
                        "error_bound": h.error_bound,
                    })
                ),
                Format::Csv => {
                    println!("benchmark,n,m,operator,counts,start,expected_iterations,error_bound");
                    println!(
                        "{},{},{},{},{},{},{},{}",
                        spec.kind_name(),
                        spec.n(),
                        spec.jump_m().map_or(String::new(), |m| m.to_string()),
                        p.mutation().operator_label(),
                        p.counts.label(),
                        p.start.label(),
                        h.expected,
                        h.error_bound
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn execute_plan(plan: &SweepPlan, cli: &Cli, opts: &ReportOptions) -> Result<ExitCode> {
    let progress = |c: &CellResult| {
        let s = &c.summary;
        eprintln!(
            "{} {}: {}/{} solved, mean {}",
            c.cell.spec.key(),
            c.cell.mutation.label(),
            s.successes,
            s.run_count,
            s.mean_iterations.map_or("-".into(), |m| format!("{m:.1}"))
        );
    };
    match &cli.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let results = if opts.format == Format::Csv {
                let mut writer = RunCsvWriter::create(&dir.join("runs.csv"), opts.timestamp)?;
                run_sweep(plan, cli.threads, |c| {
                    progress(c);
                    writer.write_cell(c)
                })?
            } else {
                run_sweep(plan, cli.threads, |c| {
                    progress(c);
                    Ok(())
                })?
            };
            std::fs::write(dir.join("plan.toml"), plan.to_toml_string()?)?;
            emit_report(&results, dir, opts)?;
        }
        None => {
            let results = run_sweep(plan, cli.threads, |c| {
                progress(c);
                Ok(())
            })?;
            write_runs_stdout(&results, opts)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_runs_stdout(results: &[CellResult], opts: &ReportOptions) -> Result<()> {
    let stdout = std::io::stdout().lock();
    match opts.format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(stdout);
            w.write_record(RunRow::HEADER)?;
            for c in results {
                for r in c.rows() {
                    w.serialize(r)?;
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<RunRow> = results.iter().flat_map(|c| c.rows()).collect();
            serde_json::to_writer_pretty(stdout, &rows)?;
            println!();
        }
    }
    Ok(())
}

/// Path of the run table inside an output directory.
pub fn runs_csv(dir: &Path) -> PathBuf {
    dir.join("runs.csv")
}
