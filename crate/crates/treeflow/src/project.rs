//! Euclidean projections: onto monotone sequences, capped simplices, single
//! node halfspaces, and the full flow cone.
//!
//! The flow cone is the intersection of one halfspace per node (flow at least
//! the children's total, leaves nonnegative). Its projection is computed by
//! Dykstra's alternating method with one correction term per halfspace; each
//! correction is a multiple of that halfspace's normal, so a full sweep costs
//! O(n) time and memory. Specialized one-dimensional structure (paths, tree
//! levels) gets direct solvers instead: pool-adjacent-violators and the
//! sorted-threshold simplex projection.

use crate::error::{Error, Result};
use crate::flow::{child_total, FlowVector};
use crate::tree::RootedTree;

/// Stopping rules for the sweep-based cone projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionConfig {
    /// Hard cap on full sweeps.
    pub max_sweeps: usize,
    /// Largest tolerated constraint violation at exit.
    pub primal_tol: f64,
    /// Sweep-to-sweep sup-norm change threshold, scaled by `1 + ||y||_inf`.
    pub change_tol: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            max_sweeps: 10_000,
            primal_tol: 1e-9,
            change_tol: 1e-10,
        }
    }
}

/// Outcome of a cone projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub point: FlowVector,
    pub sweeps_used: usize,
    pub max_violation: f64,
    pub converged: bool,
}

impl ProjectionReport {
    /// Diagnostics in CSV form, header `sweeps,max_violation,converged`.
    pub fn to_csv(&self) -> String {
        format!(
            "sweeps,max_violation,converged\n{},{:e},{}\n",
            self.sweeps_used, self.max_violation, self.converged
        )
    }
}

/// Least-squares fit of a nonincreasing sequence by pooling adjacent
/// violators. Pooled blocks carry the mean of their members.
pub fn pava_nonincreasing(y: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut mean: Vec<f64> = Vec::with_capacity(y.len());
    let mut width: Vec<usize> = Vec::with_capacity(y.len());
    for &v in y {
        mean.push(v);
        width.push(1);
        while mean.len() > 1 && mean[mean.len() - 2] < mean[mean.len() - 1] {
            let m2 = mean.pop().unwrap();
            let w2 = width.pop().unwrap();
            let k = mean.len() - 1;
            let w1 = width[k];
            mean[k] = (mean[k] * w1 as f64 + m2 * w2 as f64) / (w1 + w2) as f64;
            width[k] = w1 + w2;
        }
    }
    let mut out = Vec::with_capacity(y.len());
    for (m, w) in mean.iter().zip(&width) {
        out.extend(std::iter::repeat_n(*m, *w));
    }
    Ok(out)
}

/// Projection onto nonincreasing nonnegative sequences: the isotonic fit
/// clamped at zero.
pub fn project_monotone_nonneg(y: &[f64]) -> Result<Vec<f64>> {
    let mut fit = pava_nonincreasing(y)?;
    for v in &mut fit {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(fit)
}

/// Projection onto `{x >= 0, sum(x) <= budget}`. When clamping negatives
/// already lands under the budget that is the answer; otherwise the sum
/// constraint binds and the sorted-threshold rule projects onto the scaled
/// simplex face.
pub fn project_simplex_cap(y: &[f64], budget: f64) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(budget >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "simplex budget must be nonnegative, got {budget}"
        )));
    }
    let clamped: Vec<f64> = y.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= budget {
        return Ok(clamped);
    }
    if budget == 0.0 {
        return Ok(vec![0.0; y.len()]);
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut prefix = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        prefix += u;
        let candidate = (prefix - budget) / (k + 1) as f64;
        if u - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    Ok(y.iter().map(|&v| (v - tau).max(0.0)).collect())
}

/// Projection onto the single node-`node` halfspace: flow at `node` at least
/// the children's total (at least zero for leaves). Violations are repaired
/// by the minimal move along the constraint normal.
pub fn project_halfspace_node(x: &[f64], tree: &RootedTree, node: usize) -> Result<Vec<f64>> {
    if x.len() != tree.node_count() {
        return Err(Error::LengthMismatch {
            expected: tree.node_count(),
            got: x.len(),
        });
    }
    let mut out = x.to_vec();
    let children = tree.children(node);
    let slack = out[node] - child_total(&out, children);
    if slack < 0.0 {
        let step = -slack / (1 + children.len()) as f64;
        out[node] += step;
        for &c in children {
            out[c] -= step;
        }
    }
    Ok(out)
}

/// Largest constraint violation of `x` over all node halfspaces.
fn max_violation(x: &[f64], tree: &RootedTree) -> f64 {
    let mut worst = 0.0f64;
    for node in 0..x.len() {
        let slack = x[node] - child_total(x, tree.children(node));
        worst = worst.max(-slack);
    }
    worst
}

/// Dykstra's alternating projection onto the flow cone. Sweeps the node
/// halfspaces in index order, keeping one correction magnitude per node (each
/// correction is a nonnegative multiple of that node's constraint normal).
/// Stops once the iterate is feasible to `primal_tol` and a whole sweep moves
/// it by at most `change_tol * (1 + ||y||_inf)` in sup norm; a feasible input
/// is returned unchanged after one sweep.
pub fn dykstra_project_flow(
    y: &[f64],
    tree: &RootedTree,
    cfg: &ProjectionConfig,
) -> Result<ProjectionReport> {
    let n = tree.node_count();
    if y.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: y.len() });
    }
    if cfg.max_sweeps == 0 || !(cfg.primal_tol > 0.0) || !(cfg.change_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "projection config needs max_sweeps >= 1 and positive tolerances".into(),
        ));
    }
    let scale = 1.0 + y.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let change_cap = cfg.change_tol * scale;

    let mut x = y.to_vec();
    let mut pressure = vec![0.0f64; n];
    let mut prev = vec![0.0f64; n];
    let mut sweeps_used = 0;
    let mut converged = false;
    let mut worst = f64::INFINITY;

    for _ in 0..cfg.max_sweeps {
        sweeps_used += 1;
        prev.copy_from_slice(&x);
        for node in 0..n {
            let children = tree.children(node);
            let beta = pressure[node];
            if beta != 0.0 {
                x[node] -= beta;
                for &c in children {
                    x[c] += beta;
                }
            }
            let slack = x[node] - child_total(&x, children);
            if slack >= 0.0 {
                pressure[node] = 0.0;
            } else {
                let step = -slack / (1 + children.len()) as f64;
                x[node] += step;
                for &c in children {
                    x[c] -= step;
                }
                pressure[node] = step;
            }
        }
        worst = max_violation(&x, tree);
        let change = x
            .iter()
            .zip(&prev)
            .fold(0.0f64, |a, (new, old)| a.max((new - old).abs()));
        if worst <= cfg.primal_tol && change <= change_cap {
            converged = true;
            break;
        }
    }

    Ok(ProjectionReport {
        point: FlowVector::new(x),
        sweeps_used,
        max_violation: worst,
        converged,
    })
}
