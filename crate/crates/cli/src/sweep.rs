//! Running plans cell by cell.

use anyhow::Result;
use permubench_core::{run_batch, BatchOptions, BatchSummary, RegionLabel, StartPolicy};
use serde::{Deserialize, Serialize};

use crate::config::{Cell, SweepPlan};

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    pub start: StartPolicy,
    pub summary: BatchSummary,
}

/// One line of the run table. The first nine columns are fixed; the rest
/// are appended after them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub benchmark: String,
    pub n: usize,
    pub m: Option<usize>,
    pub operator: String,
    pub counts: String,
    pub seed: u64,
    pub iterations: u64,
    pub success: bool,
    pub final_fitness: i64,
    pub start: String,
    pub budget: u64,
    pub a1_entry: Option<u64>,
    pub a2_entry: Option<u64>,
    pub a2plus_entry: Option<u64>,
    pub a3_entry: Option<u64>,
    pub cycle_change_events: u64,
}

impl RunRow {
    pub const HEADER: [&'static str; 16] = [
        "benchmark",
        "n",
        "m",
        "operator",
        "counts",
        "seed",
        "iterations",
        "success",
        "final_fitness",
        "start",
        "budget",
        "a1_entry",
        "a2_entry",
        "a2plus_entry",
        "a3_entry",
        "cycle_change_events",
    ];
}

impl CellResult {
    /// Per-run rows in seed-index order.
    pub fn rows(&self) -> Vec<RunRow> {
        let spec = &self.cell.spec;
        self.summary
            .records
            .iter()
            .map(|r| {
                let entry = |l| r.region_entry_iterations.get(&l).copied();
                RunRow {
                    benchmark: spec.kind_name().to_string(),
                    n: spec.n(),
                    m: spec.jump_m(),
                    operator: self.cell.mutation.operator_label().to_string(),
                    counts: self.cell.mutation.counts.label(),
                    seed: r.seed,
                    iterations: r.iterations,
                    success: r.success,
                    final_fitness: r.final_fitness.0,
                    start: self.start.label(),
                    budget: self.cell.budget,
                    a1_entry: entry(RegionLabel::A1),
                    a2_entry: entry(RegionLabel::A2Interior),
                    a2plus_entry: entry(RegionLabel::A2Plus),
                    a3_entry: entry(RegionLabel::A3),
                    cycle_change_events: r.cycle_change_events,
                }
            })
            .collect()
    }
}

/// Runs every cell in plan order, handing each result to `on_cell` as soon
/// as it is complete. Runs inside a cell go in parallel; the results do not
/// depend on `threads`.
pub fn run_sweep(
    plan: &SweepPlan,
    threads: Option<usize>,
    mut on_cell: impl FnMut(&CellResult) -> Result<()>,
) -> Result<Vec<CellResult>> {
    let cells = plan.cells()?;
    let mut out = Vec::with_capacity(cells.len());
    for cell in cells {
        let summary = run_batch(
            &cell.spec,
            &cell.config,
            &BatchOptions {
                budget: cell.budget,
                run_count: plan.runs_per_cell,
                master_seed: cell.seed,
                start: plan.start.clone(),
                threads,
                record_trajectory: false,
            },
        )?;
        let result = CellResult {
            cell,
            start: plan.start.clone(),
            summary,
        };
        on_cell(&result)?;
        out.push(result);
    }
    Ok(out)
}
