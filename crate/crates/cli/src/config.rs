//! Sweep plans, read from TOML.
//!
//! ```toml
//! master_seed = 1
//! runs_per_cell = 300
//! n_values = [8, 10, 12, 14, 16]
//! start = "a2plus"
//!
//! [benchmark]
//! kind = "pjump"
//! m = 3
//!
//! [budget]
//! rule = "theory"
//! factor = 50.0
//!
//! [[mutations]]
//! operator = "swap"
//! counts = { kind = "poisson", lambda = 1.0 }
//!
//! [[mutations]]
//! operator = "scramble"
//! counts = { kind = "powerlaw", beta = 1.5 }
//! ```
//!
//! A power law without `u` takes `u = n` in each cell.

use std::path::Path;

use anyhow::{bail, Context, Result};
use permubench_core::{
    derive_seed, theory_budget, BenchmarkSpec, MutationConfig, MutationSpec, StartPolicy, DEFAULT_BUDGET_FACTOR,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    PHam,
    PLeadingOnes,
    PJump,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkTemplate {
    pub kind: TemplateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl BenchmarkTemplate {
    pub fn instantiate(&self, n: usize) -> Result<BenchmarkSpec> {
        Ok(match (self.kind, self.m) {
            (TemplateKind::PHam, None) => BenchmarkSpec::p_ham(n)?,
            (TemplateKind::PLeadingOnes, None) => BenchmarkSpec::p_leading_ones(n)?,
            (TemplateKind::PJump, Some(m)) => BenchmarkSpec::p_jump(n, m)?,
            (TemplateKind::PJump, None) => bail!("pjump needs m"),
            (_, Some(_)) => bail!("only pjump takes m"),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase", deny_unknown_fields)]
pub enum BudgetRule {
    /// `factor ×` the theoretical order of the cell.
    Theory { factor: f64 },
    Fixed { iterations: u64 },
}

impl Default for BudgetRule {
    fn default() -> Self {
        BudgetRule::Theory {
            factor: DEFAULT_BUDGET_FACTOR,
        }
    }
}

impl BudgetRule {
    pub fn budget(&self, spec: &BenchmarkSpec, mcfg: &MutationConfig) -> Result<u64> {
        match *self {
            BudgetRule::Theory { factor } => Ok(theory_budget(spec, mcfg, factor)?),
            BudgetRule::Fixed { iterations } => Ok(iterations),
        }
    }
}

fn default_start() -> StartPolicy {
    StartPolicy::UniformRandom
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub benchmark: BenchmarkTemplate,
    pub n_values: Vec<usize>,
    pub mutations: Vec<MutationSpec>,
    pub runs_per_cell: usize,
    #[serde(default)]
    pub budget: BudgetRule,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_start")]
    pub start: StartPolicy,
}

/// One `(mutation, n)` combination of a plan, fully resolved.
#[derive(Debug, Clone)]
pub struct Cell {
    pub spec: BenchmarkSpec,
    pub mutation: MutationSpec,
    pub config: MutationConfig,
    pub budget: u64,
    pub seed: u64,
}

impl SweepPlan {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let plan: SweepPlan = toml::from_str(text).context("parsing sweep plan")?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml_str(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_cell == 0 {
            bail!("runs_per_cell must be at least 1");
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            bail!("n_values must be strictly increasing");
        }
        if self.mutations.is_empty() && !self.n_values.is_empty() {
            bail!("no mutations given");
        }
        // Resolving every cell catches bad sizes and budgets before any run.
        self.cells().map(|_| ())
    }

    /// Cells in output order: mutations as listed, then increasing `n`.
    /// A cell's seed depends on the master seed, the mutation's position
    /// and `n`, so adding sizes leaves existing cells unchanged.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut out = Vec::new();
        for (mi, mutation) in self.mutations.iter().enumerate() {
            for &n in &self.n_values {
                let spec = self.benchmark.instantiate(n)?;
                let config = mutation
                    .resolve(n)
                    .with_context(|| format!("mutation {} at n = {n}", mutation.label()))?;
                let budget = self
                    .budget
                    .budget(&spec, &config)
                    .with_context(|| format!("budget for {} with {}", spec.key(), mutation.label()))?;
                out.push(Cell {
                    seed: derive_seed(derive_seed(self.master_seed, mi as u64), n as u64),
                    spec,
                    mutation: mutation.clone(),
                    config,
                    budget,
                });
            }
        }
        Ok(out)
    }
}
