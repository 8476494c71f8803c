//! Output files: run and cell tables, fits, JSON, plot data.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::fit::{fit_points, size_points, FitResult, GroupKey, SizePoint, DEFAULT_SUCCESS_FLOOR};
use crate::sweep::{CellResult, RunRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn timestamp_line() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("# generated at unix time {secs}\n")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Run table written row by row, flushed after every cell.
pub struct RunCsvWriter {
    inner: csv::Writer<BufWriter<File>>,
}

impl RunCsvWriter {
    pub fn create(path: &Path, timestamp: bool) -> Result<Self> {
        let mut file = create(path)?;
        if timestamp {
            file.write_all(timestamp_line().as_bytes())?;
        }
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        inner.write_record(RunRow::HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write_cell(&mut self, cell: &CellResult) -> Result<()> {
        for row in cell.rows() {
            self.inner.serialize(row)?;
        }
        self.inner.flush()?;
        Ok(())
    }
}

/// Reads a run table, skipping `#` lines.
pub fn read_runs(path: &Path) -> Result<Vec<RunRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<RunRow>, _>>()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub benchmark: String,
    pub n: usize,
    pub m: Option<usize>,
    pub operator: String,
    pub counts: String,
    pub start: String,
    pub budget: u64,
    pub seed: u64,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_iterations: Option<f64>,
    pub standard_error: Option<f64>,
    pub censored: bool,
}

impl CellRow {
    pub fn of(c: &CellResult) -> Self {
        let s = &c.summary;
        Self {
            benchmark: c.cell.spec.kind_name().to_string(),
            n: c.cell.spec.n(),
            m: c.cell.spec.jump_m(),
            operator: c.cell.mutation.operator_label().to_string(),
            counts: c.cell.mutation.counts.label(),
            start: c.start.label(),
            budget: c.cell.budget,
            seed: c.cell.seed,
            runs: s.run_count,
            successes: s.successes,
            success_rate: s.success_rate,
            mean_iterations: s.mean_iterations,
            standard_error: s.standard_error,
            censored: s.censored,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub benchmark: String,
    pub m: Option<usize>,
    pub operator: String,
    pub counts: String,
    pub exponent: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub points: usize,
}

/// One fitted line per group, or why there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFit {
    pub group: GroupKey,
    pub sizes: Vec<SizePoint>,
    pub fit: Option<FitResult>,
    pub skipped: Option<String>,
}

pub fn fit_groups(rows: &[RunRow], floor: f64) -> Vec<GroupFit> {
    size_points(rows)
        .into_iter()
        .map(|(group, sizes)| match fit_points(&sizes, floor) {
            Ok(fit) => GroupFit {
                group,
                sizes,
                fit: Some(fit),
                skipped: None,
            },
            Err(e) => GroupFit {
                group,
                sizes,
                fit: None,
                skipped: Some(e.to_string()),
            },
        })
        .collect()
}

fn write_csv_file<T: Serialize>(path: &Path, header: &[&str], rows: &[T], timestamp: bool) -> Result<()> {
    let mut file = create(path)?;
    if timestamp {
        file.write_all(timestamp_line().as_bytes())?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

const CELL_HEADER: [&str; 14] = [
    "benchmark",
    "n",
    "m",
    "operator",
    "counts",
    "start",
    "budget",
    "seed",
    "runs",
    "successes",
    "success_rate",
    "mean_iterations",
    "standard_error",
    "censored",
];

const FIT_HEADER: [&str; 8] = [
    "benchmark",
    "m",
    "operator",
    "counts",
    "exponent",
    "slope_se",
    "intercept",
    "points",
];

#[derive(Serialize)]
struct JsonReport<'a> {
    cells: Vec<JsonCell<'a>>,
    fits: &'a [GroupFit],
}

#[derive(Serialize)]
struct JsonCell<'a> {
    #[serde(flatten)]
    cell: CellRow,
    records: &'a [permubench_core::RunRecord],
}

pub struct ReportOptions {
    pub format: Format,
    pub timestamp: bool,
    pub floor: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            format: Format::Csv,
            timestamp: true,
            floor: DEFAULT_SUCCESS_FLOOR,
        }
    }
}

/// Writes the summary tables, fits and plot data for finished cells and
/// returns the paths written. The run table itself is written while the
/// sweep runs (see [`RunCsvWriter`]).
pub fn emit_report(results: &[CellResult], out_dir: &Path, opts: &ReportOptions) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let rows: Vec<RunRow> = results.iter().flat_map(|c| c.rows()).collect();
    let fits = fit_groups(&rows, opts.floor);
    let mut written = Vec::new();
    match opts.format {
        Format::Csv => {
            let cells: Vec<CellRow> = results.iter().map(CellRow::of).collect();
            let path = out_dir.join("cells.csv");
            write_csv_file(&path, &CELL_HEADER, &cells, opts.timestamp)?;
            written.push(path);
            let fit_rows: Vec<FitRow> = fits
                .iter()
                .filter_map(|g| {
                    g.fit.as_ref().map(|f| FitRow {
                        benchmark: g.group.benchmark.clone(),
                        m: g.group.m,
                        operator: g.group.operator.clone(),
                        counts: g.group.counts.clone(),
                        exponent: f.exponent,
                        slope_se: f.slope_se,
                        intercept: f.intercept,
                        points: f.points.len(),
                    })
                })
                .collect();
            let path = out_dir.join("fits.csv");
            write_csv_file(&path, &FIT_HEADER, &fit_rows, opts.timestamp)?;
            written.push(path);
        }
        Format::Json => {
            let report = JsonReport {
                cells: results
                    .iter()
                    .map(|c| JsonCell {
                        cell: CellRow::of(c),
                        records: &c.summary.records,
                    })
                    .collect(),
                fits: &fits,
            };
            let path = out_dir.join("report.json");
            let mut f = create(&path)?;
            serde_json::to_writer_pretty(&mut f, &report)?;
            f.write_all(b"\n")?;
            f.flush()?;
            written.push(path);
        }
    }
    for g in &fits {
        let path = out_dir.join(format!("plot_{}.dat", g.group.slug()));
        write_plot_data(&path, g)?;
        written.push(path);
    }
    Ok(written)
}

/// Two columns `ln_n ln_mean`, then the fitted line as a comment.
fn write_plot_data(path: &Path, g: &GroupFit) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "# ln_n ln_mean_iterations")?;
    for p in &g.sizes {
        if let Some(mean) = p.mean_iterations {
            writeln!(f, "{:.10} {:.10}", (p.n as f64).ln(), mean.ln())?;
        }
    }
    match &g.fit {
        Some(fit) => writeln!(
            f,
            "# fit slope={:.10} intercept={:.10} slope_se={:.10}",
            fit.exponent, fit.intercept, fit.slope_se
        )?,
        None => writeln!(f, "# no fit: {}", g.skipped.as_deref().unwrap_or("unknown"))?,
    }
    f.flush()?;
    Ok(())
}
