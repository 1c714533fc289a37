//! Denoising flows on rooted trees.
//!
//! A flow on a rooted tree assigns each node a value no smaller than the sum
//! over its children; the set of flows is a closed convex cone. This crate
//! provides the cone machinery (trees, flows, leak coordinates), Euclidean
//! projections onto the cone and related sets, a family of denoising
//! estimators for flows observed under Gaussian noise, finite nets over
//! bounded flows, and seeded Monte-Carlo drivers for risk curves and
//! statistical dimension estimates.

mod error;
pub mod estimator;
pub mod exact;
pub mod fileio;
pub mod flow;
pub mod net;
pub mod project;
pub mod sim;
pub mod tree;

pub use error::{Error, Result};
pub use estimator::{Estimator, EstimatorKind, EstimatorSpec};
pub use exact::qp_project_exact;
pub use flow::{flow_to_leaks, leaks_to_flow, worst_case_flow, FlowVector, LeakVector};
pub use net::{build_maurey_net, cover_radius_check, piecewise_approx, MaureyNet};
pub use project::{
    dykstra_project_flow, pava_nonincreasing, project_monotone_nonneg, project_simplex_cap,
    ProjectionConfig, ProjectionReport,
};
pub use sim::{
    fit_exponent, gen_observation, simulate_risk, simulate_risk_threaded, statdim_flow_cone,
    statdim_monotone, statdim_of, NoiseModel, RiskCurve, RiskPoint, RiskStats, StatDimEstimate,
};
pub use tree::{build_kite, KiteSpec, RootedTree};
