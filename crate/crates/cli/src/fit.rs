//! Log-log regression of mean runtime on problem size.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use permubench_core::mean_and_se;
use serde::{Deserialize, Serialize};

use crate::sweep::RunRow;

/// Cells whose success rate falls below this are left out of fits.
pub const DEFAULT_SUCCESS_FLOOR: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Slope of `ln mean` against `ln n`.
    pub exponent: f64,
    pub intercept: f64,
    pub slope_se: f64,
    /// `ln mean − (intercept + exponent · ln n)` per point.
    pub residuals: Vec<f64>,
    /// The `(n, mean)` pairs fitted.
    pub points: Vec<(f64, f64)>,
}

/// Ordinary least squares on `(ln n, ln mean)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        bail!("a fit needs at least 3 points, got {}", points.len());
    }
    if points.iter().any(|&(n, y)| !(n > 0.0 && y > 0.0)) {
        bail!("sizes and means must be positive");
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        bail!("all sizes are equal");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - intercept - exponent * x).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    Ok(FitResult {
        exponent,
        intercept,
        slope_se: (ssr / (k - 2.0) / sxx).sqrt(),
        residuals,
        points: points.to_vec(),
    })
}

/// Per-size aggregate of one group of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizePoint {
    pub n: usize,
    pub runs: usize,
    pub success_rate: f64,
    pub mean_iterations: Option<f64>,
    pub standard_error: Option<f64>,
}

/// Runs grouped by benchmark, gap, operator and count law.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub benchmark: String,
    pub m: Option<usize>,
    pub operator: String,
    pub counts: String,
}

impl GroupKey {
    pub fn of(row: &RunRow) -> Self {
        Self {
            benchmark: row.benchmark.clone(),
            m: row.m,
            operator: row.operator.clone(),
            counts: row.counts.clone(),
        }
    }

    /// File-name friendly form, e.g. `pjump_m3_swap_poisson-1`.
    pub fn slug(&self) -> String {
        let m = self.m.map(|m| format!("_m{m}")).unwrap_or_default();
        let counts: String = self
            .counts
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' })
            .collect();
        let op = self.operator.replace('+', "plus");
        format!("{}{m}_{op}_{}", self.benchmark, counts.trim_matches('-'))
    }
}

pub fn size_points(rows: &[RunRow]) -> BTreeMap<GroupKey, Vec<SizePoint>> {
    let mut grouped: BTreeMap<GroupKey, BTreeMap<usize, Vec<&RunRow>>> = BTreeMap::new();
    for r in rows {
        grouped.entry(GroupKey::of(r)).or_default().entry(r.n).or_default().push(r);
    }
    grouped
        .into_iter()
        .map(|(key, by_n)| {
            let pts = by_n
                .into_iter()
                .map(|(n, rs)| {
                    let its: Vec<f64> = rs.iter().filter(|r| r.success).map(|r| r.iterations as f64).collect();
                    let (mean, se) = mean_and_se(&its);
                    SizePoint {
                        n,
                        runs: rs.len(),
                        success_rate: its.len() as f64 / rs.len() as f64,
                        mean_iterations: mean,
                        standard_error: se,
                    }
                })
                .collect();
            (key, pts)
        })
        .collect()
}

/// Fits a group over the sizes whose success rate reaches `floor`.
pub fn fit_points(points: &[SizePoint], floor: f64) -> Result<FitResult> {
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.success_rate >= floor)
        .filter_map(|p| p.mean_iterations.map(|m| (p.n as f64, m)))
        .collect();
    fit_exponent(&kept)
}
