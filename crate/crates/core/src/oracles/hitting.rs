//! Expected optimisation time of the EA on `S_n`, `n <= 7`, by solving the
//! absorbing-chain system `(I − Q) h = 1` over the non-optimal states.

use crate::benchmarks::BenchmarkSpec;
use crate::engine::StartPolicy;
use crate::error::{invalid, Error, Result};
use crate::mutation::MutationConfig;
use crate::oracles::kernel::{MutationLaw, StateSpace, DEFAULT_TAIL_BOUND};
use crate::perm::is_good_cycle_type;

#[derive(Debug, Clone)]
pub struct HittingTime {
    /// Expected iterations averaged over the start distribution; infinite if
    /// the start distribution puts mass on states that cannot reach the
    /// optimum.
    pub expected: f64,
    /// First-order bound on the error caused by truncating the count law.
    pub error_bound: f64,
    /// Expected iterations from each state, by lexicographic rank.
    pub per_state: Vec<f64>,
}

/// Exact expected iterations until the EA first evaluates an optimum.
pub fn ea_hitting_time_exact(spec: &BenchmarkSpec, mcfg: &MutationConfig, start: &StartPolicy) -> Result<HittingTime> {
    ea_hitting_time_with_tail(spec, mcfg, start, DEFAULT_TAIL_BOUND)
}

pub fn ea_hitting_time_with_tail(
    spec: &BenchmarkSpec,
    mcfg: &MutationConfig,
    start: &StartPolicy,
    tail_bound: f64,
) -> Result<HittingTime> {
    let n = spec.n();
    let law = MutationLaw::new(n, mcfg, tail_bound)?;
    let space = StateSpace::new(n)?;
    let start_weights = start_distribution(spec, start, &space)?;
    let d = space.len();
    let fitness: Vec<i64> = space.states.iter().map(|s| spec.evaluate_word(s.as_zero_based()).0).collect();
    let optimal: Vec<bool> = space
        .states
        .iter()
        .map(|s| spec.is_global_optimum(s))
        .collect::<Result<_>>()?;
    let moves: Vec<(usize, f64)> = law
        .weights
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &w)| w > 0.0)
        .map(|(r, &w)| (r, w))
        .collect();

    // Accepted moves per state.
    let edges: Vec<Vec<(usize, f64)>> = (0..d)
        .map(|s| {
            if optimal[s] {
                return Vec::new();
            }
            let mut out: Vec<(usize, f64)> = Vec::new();
            for &(rho, w) in &moves {
                let t = space.compose_index(rho, s);
                if fitness[t] >= fitness[s] {
                    out.push((t, w));
                }
            }
            out
        })
        .collect();

    // States that can reach an optimum, then drop any state that can move
    // into one that cannot: its expectation is infinite too.
    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (s, out) in edges.iter().enumerate() {
        for &(t, _) in out {
            reverse[t].push(s);
        }
    }
    let mut finite = optimal.clone();
    let mut queue: Vec<usize> = (0..d).filter(|&s| optimal[s]).collect();
    while let Some(t) = queue.pop() {
        for &s in &reverse[t] {
            if !finite[s] {
                finite[s] = true;
                queue.push(s);
            }
        }
    }
    loop {
        let mut changed = false;
        for s in 0..d {
            if finite[s] && edges[s].iter().any(|&(t, _)| !finite[t]) {
                finite[s] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let transient: Vec<usize> = (0..d).filter(|&s| finite[s] && !optimal[s]).collect();
    let mut slot = vec![usize::MAX; d];
    for (i, &s) in transient.iter().enumerate() {
        slot[s] = i;
    }
    let k = transient.len();
    let mut a = vec![0.0; k * k];
    let mut b = vec![1.0; k];
    for (i, &s) in transient.iter().enumerate() {
        let mut leave = 0.0;
        for &(t, w) in &edges[s] {
            leave += w;
            if !optimal[t] {
                a[i * k + slot[t]] -= w;
            }
        }
        a[i * k + i] += leave;
    }
    solve_dense(&mut a, &mut b, k)?;

    let mut per_state = vec![f64::INFINITY; d];
    for s in 0..d {
        if optimal[s] {
            per_state[s] = 0.0;
        } else if finite[s] {
            per_state[s] = b[slot[s]];
        }
    }
    let mut expected = 0.0;
    for (s, &w) in start_weights.iter().enumerate() {
        if w > 0.0 {
            expected += w * per_state[s];
        }
    }
    let h_max = b.iter().cloned().fold(0.0, f64::max);
    Ok(HittingTime {
        expected,
        error_bound: law.truncation_error * h_max * h_max,
        per_state,
    })
}

fn start_distribution(spec: &BenchmarkSpec, start: &StartPolicy, space: &StateSpace) -> Result<Vec<f64>> {
    let n = spec.n();
    let d = space.len();
    let mut w = vec![0.0; d];
    let uniform_over = |w: &mut Vec<f64>, keep: &dyn Fn(usize) -> bool| {
        let chosen: Vec<usize> = (0..d).filter(|&s| keep(s)).collect();
        for &s in &chosen {
            w[s] = 1.0 / chosen.len() as f64;
        }
    };
    match start {
        StartPolicy::UniformRandom => uniform_over(&mut w, &|_| true),
        StartPolicy::Identity => w[0] = 1.0,
        StartPolicy::Explicit(p) => {
            if p.size() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    actual: p.size(),
                });
            }
            w[p.lex_rank()] = 1.0;
        }
        StartPolicy::UniformA2Plus | StartPolicy::UniformGood => {
            let m = spec
                .jump_m()
                .ok_or_else(|| invalid("local-optimum start needs a jump benchmark"))?;
            let good_only = matches!(start, StartPolicy::UniformGood);
            uniform_over(&mut w, &|s| {
                let sigma = &space.states[s];
                sigma.fixed_point_count() == n - m
                    && (!good_only || is_good_cycle_type(&sigma.nontrivial_cycle_lengths(), m))
            });
        }
    }
    Ok(w)
}

/// Gaussian elimination with partial pivoting; the solution overwrites `b`.
fn solve_dense(a: &mut [f64], b: &mut [f64], k: usize) -> Result<()> {
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i * k + col].abs().total_cmp(&a[j * k + col].abs()))
            .unwrap_or(col);
        if a[pivot * k + col].abs() < 1e-300 {
            return Err(invalid("singular hitting-time system"));
        }
        if pivot != col {
            for j in 0..k {
                a.swap(pivot * k + j, col * k + j);
            }
            b.swap(pivot, col);
        }
        let diag = a[col * k + col];
        for row in col + 1..k {
            let f = a[row * k + col] / diag;
            if f == 0.0 {
                continue;
            }
            for j in col..k {
                a[row * k + j] -= f * a[col * k + j];
            }
            b[row] -= f * b[col];
        }
    }
    for row in (0..k).rev() {
        let mut acc = b[row];
        for j in row + 1..k {
            acc -= a[row * k + j] * b[j];
        }
        b[row] = acc / a[row * k + row];
    }
    Ok(())
}
