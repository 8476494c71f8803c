//! Experiment driver for `permubench-core`: sweep plans, run tables,
//! exponent fits and lemma checks.

pub mod app;
pub mod config;
pub mod fit;
pub mod report;
pub mod sweep;
pub mod verify;

pub use app::{run, Cli};
pub use config::{BenchmarkTemplate, BudgetRule, Cell, SweepPlan, TemplateKind};
pub use fit::{fit_exponent, FitResult, DEFAULT_SUCCESS_FLOOR};
pub use report::{emit_report, read_runs, Format, ReportOptions, RunCsvWriter};
pub use sweep::{run_sweep, CellResult, RunRow};
pub use verify::{verify_lemmas, Lemma, LemmaReport, VerifySettings};
