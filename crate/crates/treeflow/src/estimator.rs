//! Denoising estimators over the flow cone.
//!
//! All estimators map an observation vector to a feasible flow except
//! `identity`, which passes the observation through as a baseline. The
//! structured ones (`natural`, `oracle_simplex`) only apply to kite trees,
//! where paths and levels are well defined; both finish with a full cone
//! projection so their output is feasible regardless of how the structured
//! stage interleaves.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flow::FlowVector;
use crate::net::{build_maurey_net, MaureyNet};
use crate::project::{
    dykstra_project_flow, project_monotone_nonneg, project_simplex_cap, ProjectionConfig,
};
use crate::tree::{kite_layout, RootedTree};

/// The estimator families the toolkit ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Lse,
    Natural,
    OracleSimplex,
    NetLse,
    Zero,
    Identity,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Lse => "lse",
            EstimatorKind::Natural => "natural",
            EstimatorKind::OracleSimplex => "oracle_simplex",
            EstimatorKind::NetLse => "net_lse",
            EstimatorKind::Zero => "zero",
            EstimatorKind::Identity => "identity",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lse" => Ok(EstimatorKind::Lse),
            "natural" => Ok(EstimatorKind::Natural),
            "oracle_simplex" => Ok(EstimatorKind::OracleSimplex),
            "net_lse" => Ok(EstimatorKind::NetLse),
            "zero" => Ok(EstimatorKind::Zero),
            "identity" => Ok(EstimatorKind::Identity),
            other => Err(Error::InvalidParameter(format!(
                "unknown estimator {other:?}"
            ))),
        }
    }
}

/// Parsed estimator request: a kind plus whatever numeric parameters it
/// needs. `budget` feeds `oracle_simplex` and `net_lse`; `net_granularity`
/// feeds `net_lse` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    pub budget: Option<f64>,
    pub net_granularity: Option<usize>,
    pub projection: ProjectionConfig,
}

impl EstimatorSpec {
    pub fn new(kind: EstimatorKind) -> Self {
        EstimatorSpec {
            kind,
            budget: None,
            net_granularity: None,
            projection: ProjectionConfig::default(),
        }
    }
}

/// Least-squares estimator: the cone projection of the observation. Errors if
/// the projection fails to converge.
pub fn estimate_lse(y: &[f64], tree: &RootedTree, cfg: &ProjectionConfig) -> Result<FlowVector> {
    let report = dykstra_project_flow(y, tree, cfg)?;
    if !report.converged {
        return Err(Error::NotConverged {
            sweeps: report.sweeps_used,
            max_violation: report.max_violation,
        });
    }
    Ok(report.point)
}

/// Kite-structured estimator: keep the root observation, fit each path by
/// nonincreasing nonnegative regression, then project the assembled vector
/// onto the cone (the per-path fits can overload the root).
pub fn estimate_natural(y: &[f64], tree: &RootedTree, cfg: &ProjectionConfig) -> Result<FlowVector> {
    check_len(y, tree)?;
    let (m, l) = kite_layout(tree)?;
    let mut assembled = vec![0.0; y.len()];
    assembled[0] = y[0];
    for path in 0..m {
        let start = 1 + path * l;
        let fit = project_monotone_nonneg(&y[start..start + l])?;
        assembled[start..start + l].copy_from_slice(&fit);
    }
    estimate_lse(&assembled, tree, cfg)
}

/// Budget-aware kite estimator: project each level's observations onto the
/// capped simplex with the known root budget, pin the root to the budget,
/// then project onto the cone.
pub fn estimate_oracle_simplex(
    y: &[f64],
    tree: &RootedTree,
    budget: f64,
    cfg: &ProjectionConfig,
) -> Result<FlowVector> {
    check_len(y, tree)?;
    if !(budget >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "root budget must be nonnegative, got {budget}"
        )));
    }
    let (m, l) = kite_layout(tree)?;
    let mut assembled = vec![0.0; y.len()];
    assembled[0] = budget;
    let mut level = vec![0.0; m];
    for pos in 0..l {
        for path in 0..m {
            level[path] = y[1 + path * l + pos];
        }
        let fitted = project_simplex_cap(&level, budget)?;
        for path in 0..m {
            assembled[1 + path * l + pos] = fitted[path];
        }
    }
    estimate_lse(&assembled, tree, cfg)
}

/// Nearest net element in squared distance, ties broken by enumeration
/// order.
pub fn estimate_net_lse(y: &[f64], net: &MaureyNet) -> Result<FlowVector> {
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    if net.elements()[0].len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: net.elements()[0].len(),
            got: y.len(),
        });
    }
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, e) in net.elements().iter().enumerate() {
        let d = e.sq_dist(y);
        if d < best_dist {
            best = i;
            best_dist = d;
        }
    }
    Ok(net.elements()[best].clone())
}

/// The all-zero flow, a trivial baseline.
pub fn estimate_zero(y: &[f64], tree: &RootedTree) -> Result<FlowVector> {
    check_len(y, tree)?;
    Ok(FlowVector::zeros(y.len()))
}

/// The observation itself, the no-denoising baseline. Generally infeasible.
pub fn estimate_identity(y: &[f64], tree: &RootedTree) -> Result<FlowVector> {
    check_len(y, tree)?;
    Ok(FlowVector::new(y.to_vec()))
}

fn check_len(y: &[f64], tree: &RootedTree) -> Result<()> {
    if y.len() != tree.node_count() {
        return Err(Error::LengthMismatch {
            expected: tree.node_count(),
            got: y.len(),
        });
    }
    Ok(())
}

/// An estimator bound to a tree with every reusable piece (kite layout, net)
/// built once, so per-trial work is just the estimate.
#[derive(Debug, Clone)]
pub struct Estimator<'a> {
    tree: &'a RootedTree,
    kind: EstimatorKind,
    projection: ProjectionConfig,
    prepared: Prepared,
}

#[derive(Debug, Clone)]
enum Prepared {
    Lse,
    Natural,
    OracleSimplex { budget: f64 },
    NetLse { net: MaureyNet },
    Zero,
    Identity,
}

impl<'a> Estimator<'a> {
    pub fn prepare(spec: &EstimatorSpec, tree: &'a RootedTree) -> Result<Self> {
        let prepared = match spec.kind {
            EstimatorKind::Lse => Prepared::Lse,
            EstimatorKind::Natural => {
                kite_layout(tree)?;
                Prepared::Natural
            }
            EstimatorKind::OracleSimplex => {
                kite_layout(tree)?;
                let budget = spec.budget.ok_or_else(|| {
                    Error::InvalidParameter("oracle_simplex needs a budget".into())
                })?;
                Prepared::OracleSimplex { budget }
            }
            EstimatorKind::NetLse => {
                let budget = spec
                    .budget
                    .ok_or_else(|| Error::InvalidParameter("net_lse needs a budget".into()))?;
                let granularity = spec.net_granularity.ok_or_else(|| {
                    Error::InvalidParameter("net_lse needs a net granularity".into())
                })?;
                Prepared::NetLse { net: build_maurey_net(tree, budget, granularity)? }
            }
            EstimatorKind::Zero => Prepared::Zero,
            EstimatorKind::Identity => Prepared::Identity,
        };
        Ok(Estimator { tree, kind: spec.kind, projection: spec.projection, prepared })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn run(&self, y: &[f64]) -> Result<FlowVector> {
        match &self.prepared {
            Prepared::Lse => estimate_lse(y, self.tree, &self.projection),
            Prepared::Natural => estimate_natural(y, self.tree, &self.projection),
            Prepared::OracleSimplex { budget } => {
                estimate_oracle_simplex(y, self.tree, *budget, &self.projection)
            }
            Prepared::NetLse { net } => estimate_net_lse(y, net),
            Prepared::Zero => estimate_zero(y, self.tree),
            Prepared::Identity => estimate_identity(y, self.tree),
        }
    }
}
