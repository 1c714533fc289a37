//! Flow vectors on rooted trees and their leak decomposition.
//!
//! A flow assigns one real value per node and is feasible when every node
//! carries at least the sum of its children (leaves carry at least zero).
//! Equivalently, the per-node surplus, the leak, is nonnegative everywhere;
//! flows and leaks are linear images of each other, and a node's flow is the
//! sum of the leaks in its subtree.

use crate::error::{Error, Result};
use crate::tree::{KiteSpec, RootedTree};

/// Absolute slack allowed when checking feasibility or accepting leaks.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Children's total flow, summed with Neumaier compensation. A plain running
/// sum over thousands of children carries enough rounding error to hold
/// iterative projections visibly above tight tolerances; every slack and leak
/// computation shares this total so their signs agree.
pub(crate) fn child_total(values: &[f64], children: &[usize]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &c in children {
        let v = values[c];
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// One real value per node, indexed like the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowVector(Vec<f64>);

impl FlowVector {
    pub fn new(values: Vec<f64>) -> Self {
        FlowVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        FlowVector(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Surplus at `node`: flow minus the children's total. For leaves this is
    /// the flow value itself.
    pub fn leak_at(&self, tree: &RootedTree, node: usize) -> f64 {
        self.0[node] - child_total(&self.0, tree.children(node))
    }

    /// True when every node's leak is at least `-tol`.
    pub fn is_feasible(&self, tree: &RootedTree, tol: f64) -> Result<bool> {
        self.check_len(tree)?;
        Ok((0..self.len()).all(|node| self.leak_at(tree, node) >= -tol))
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn sq_dist(&self, other: &[f64]) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn check_len(&self, tree: &RootedTree) -> Result<()> {
        if self.len() != tree.node_count() {
            return Err(Error::LengthMismatch {
                expected: tree.node_count(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

impl From<Vec<f64>> for FlowVector {
    fn from(values: Vec<f64>) -> Self {
        FlowVector(values)
    }
}

impl std::ops::Index<usize> for FlowVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Nonnegative per-node surpluses; the coordinate system in which the flow
/// cone becomes the nonnegative orthant with one budget constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakVector(Vec<f64>);

impl LeakVector {
    /// Accepts the entries as leaks. Entries in `[-DEFAULT_FEASIBILITY_TOL, 0)`
    /// are rounded up to zero; anything more negative is rejected.
    pub fn new(leaks: Vec<f64>) -> Result<Self> {
        let mut leaks = leaks;
        for (node, v) in leaks.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -DEFAULT_FEASIBILITY_TOL {
                    return Err(Error::NegativeLeak { node, value: *v });
                }
                *v = 0.0;
            }
        }
        Ok(LeakVector(leaks))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for LeakVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Differences flow minus children's total at every node. Fails on flows that
/// leak negatively below tolerance.
pub fn flow_to_leaks(flow: &FlowVector, tree: &RootedTree) -> Result<LeakVector> {
    if flow.len() != tree.node_count() {
        return Err(Error::LengthMismatch {
            expected: tree.node_count(),
            got: flow.len(),
        });
    }
    let mut leaks = Vec::with_capacity(flow.len());
    for node in 0..flow.len() {
        let leak = flow.leak_at(tree, node);
        if leak < -DEFAULT_FEASIBILITY_TOL {
            return Err(Error::InfeasibleFlow { node, violation: -leak });
        }
        leaks.push(leak.max(0.0));
    }
    Ok(LeakVector(leaks))
}

/// Accumulates leaks up the tree: each node's flow is its leak plus its
/// children's flows, children taken in index order.
pub fn leaks_to_flow(leaks: &LeakVector, tree: &RootedTree) -> Result<FlowVector> {
    if leaks.len() != tree.node_count() {
        return Err(Error::LengthMismatch {
            expected: tree.node_count(),
            got: leaks.len(),
        });
    }
    let mut flow = vec![0.0; leaks.len()];
    for &node in tree.bottom_up() {
        flow[node] = leaks[node] + child_total(&flow, tree.children(node));
    }
    Ok(FlowVector(flow))
}

/// The hard instance on a kite: unit flow at the root, each path starting at
/// the root's per-child share and decreasing linearly to zero along its `l`
/// positions. The share is `n^-alpha` capped at `1/m` so the root constraint
/// survives the ceilings in `m = ceil(n^alpha)`.
pub fn worst_case_flow(spec: &KiteSpec) -> FlowVector {
    let mut share = (spec.n as f64).powf(-spec.alpha);
    if spec.m as f64 * share > 1.0 + 1e-12 {
        share = 1.0 / spec.m as f64;
    }
    let l = spec.l;
    let mut values = vec![0.0; spec.node_count()];
    values[0] = 1.0;
    for path in 0..spec.m {
        for pos in 0..l {
            let v = if l == 1 {
                share
            } else {
                share * (l - 1 - pos) as f64 / (l - 1) as f64
            };
            values[spec.node_index(path, pos)] = v;
        }
    }
    FlowVector(values)
}
