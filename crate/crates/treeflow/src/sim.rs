//! Monte-Carlo machinery: seeded Gaussian observations, risk curves over
//! tree sizes, log-log exponent fits, and statistical dimension estimates.
//!
//! Reproducibility contract: trial `t` draws from its own ChaCha stream keyed
//! by `(master_seed, t)`, coordinates in node-index order. Results therefore
//! depend only on the seed and trial index, never on scheduling; aggregation
//! walks trials in index order with pairwise summation, so any worker count
//! produces bit-identical statistics.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::estimator::{Estimator, EstimatorSpec};
use crate::flow::FlowVector;
use crate::project::{dykstra_project_flow, pava_nonincreasing, ProjectionConfig};
use crate::tree::RootedTree;

/// Additive Gaussian noise with a master seed for the per-trial streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub master_seed: u64,
}

impl NoiseModel {
    pub fn new(sigma: f64, master_seed: u64) -> Result<Self> {
        if !(sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise level must be nonnegative, got {sigma}"
            )));
        }
        Ok(NoiseModel { sigma, master_seed })
    }
}

/// The stream for one trial: seed layout is master seed, trial index, and a
/// fixed domain tag, all little-endian.
fn trial_rng(master_seed: u64, trial: u64) -> ChaCha12Rng {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&trial.to_le_bytes());
    seed[16..].copy_from_slice(b"treeflow::trial\0");
    ChaCha12Rng::from_seed(seed)
}

/// Observation for one trial: the signal plus sigma times standard normals
/// drawn in node-index order. Sigma zero reproduces the signal exactly.
pub fn gen_observation(mu: &[f64], noise: &NoiseModel, trial: u64) -> Vec<f64> {
    let mut rng = trial_rng(noise.master_seed, trial);
    mu.iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + noise.sigma * z
        })
        .collect()
}

/// Deterministic order-insensitive total; recursion keeps the rounding
/// pattern fixed regardless of how the slice was produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error over trials, after exclusions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskStats {
    pub mean_sse: f64,
    pub stderr_sse: f64,
    pub trials_used: usize,
    pub excluded: usize,
}

/// Squared error of one trial: observe, estimate, compare to the signal.
pub fn trial_sse(
    mu: &FlowVector,
    estimator: &Estimator<'_>,
    noise: &NoiseModel,
    trial: u64,
) -> Result<f64> {
    let y = gen_observation(mu.values(), noise, trial);
    let hat = estimator.run(&y)?;
    Ok(hat.sq_dist(mu.values()))
}

/// Folds per-trial outcomes into risk statistics. Non-convergence excludes
/// the trial; more than 1% exclusions, or any other error, fails the run.
pub fn summarize_trials(outcomes: Vec<Result<f64>>) -> Result<RiskStats> {
    let trials = outcomes.len();
    if trials < 2 {
        return Err(Error::InvalidParameter(format!(
            "risk simulation needs at least 2 trials, got {trials}"
        )));
    }
    let mut sses = Vec::with_capacity(trials);
    let mut excluded = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(sse) => sses.push(sse),
            Err(Error::NotConverged { .. }) => excluded += 1,
            Err(other) => return Err(other),
        }
    }
    if excluded as f64 > trials as f64 / 100.0 {
        return Err(Error::TooManyExclusions { excluded, trials });
    }
    let used = sses.len();
    let mean = pairwise_sum(&sses) / used as f64;
    let devs: Vec<f64> = sses.iter().map(|s| (s - mean) * (s - mean)).collect();
    let var = pairwise_sum(&devs) / (used - 1) as f64;
    Ok(RiskStats {
        mean_sse: mean,
        stderr_sse: (var / used as f64).sqrt(),
        trials_used: used,
        excluded,
    })
}

/// Runs `trials` independent evaluations of `f` on `threads` workers,
/// returning outcomes in trial order. Trial indices are split into
/// contiguous chunks; because each trial is seed-isolated the outcome vector
/// is identical for every worker count.
pub fn run_trials<F>(trials: usize, threads: usize, f: F) -> Vec<Result<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let threads = threads.max(1).min(trials.max(1));
    if threads <= 1 {
        return (0..trials as u64).map(f).collect();
    }
    let chunk = trials.div_ceil(threads);
    let mut out = Vec::with_capacity(trials);
    std::thread::scope(|scope| {
        let f = &f;
        let mut handles = Vec::new();
        for t in 0..threads {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(trials);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || {
                (lo as u64..hi as u64).map(f).collect::<Vec<_>>()
            }));
        }
        for handle in handles {
            out.extend(handle.join().expect("trial worker panicked"));
        }
    });
    out
}

/// Mean squared error of `spec` at signal `mu` over seeded trials.
pub fn simulate_risk(
    tree: &RootedTree,
    mu: &FlowVector,
    spec: &EstimatorSpec,
    noise: &NoiseModel,
    trials: usize,
) -> Result<RiskStats> {
    simulate_risk_threaded(tree, mu, spec, noise, trials, 1)
}

/// Same statistics as `simulate_risk`, bit for bit, on any worker count.
pub fn simulate_risk_threaded(
    tree: &RootedTree,
    mu: &FlowVector,
    spec: &EstimatorSpec,
    noise: &NoiseModel,
    trials: usize,
    threads: usize,
) -> Result<RiskStats> {
    if mu.len() != tree.node_count() {
        return Err(Error::LengthMismatch {
            expected: tree.node_count(),
            got: mu.len(),
        });
    }
    let estimator = Estimator::prepare(spec, tree)?;
    let outcomes = run_trials(trials, threads, |t| trial_sse(mu, &estimator, noise, t));
    summarize_trials(outcomes)
}

/// One point of a risk curve at tree size `n` (the true node count).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPoint {
    pub n: usize,
    pub mean_sse: f64,
    pub stderr_sse: f64,
    pub trials: usize,
}

/// Log-log least squares line through `(n, mean_sse)` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

/// A fitted risk curve: the raw points and their growth exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskCurve {
    pub points: Vec<RiskPoint>,
    pub fit: ExponentFit,
}

impl RiskCurve {
    pub fn fit(points: Vec<RiskPoint>) -> Result<RiskCurve> {
        let pairs: Vec<(f64, f64)> = points
            .iter()
            .map(|p| (p.n as f64, p.mean_sse))
            .collect();
        let fit = fit_exponent(&pairs)?;
        Ok(RiskCurve { points, fit })
    }
}

/// Ordinary least squares of `ln(value)` on `ln(size)`. Needs three or more
/// points, positive coordinates, and at least two distinct sizes. The slope
/// standard error uses the unbiased residual variance.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    for (index, &(n, v)) in points.iter().enumerate() {
        if !(n > 0.0) {
            return Err(Error::NonPositiveValue { index, value: n });
        }
        if !(v > 0.0) {
            return Err(Error::NonPositiveValue { index, value: v });
        }
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = pairwise_sum(&xs) / k;
    let ybar = pairwise_sum(&ys) / k;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter(
            "exponent fit needs at least two distinct sizes".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let slope_stderr = (rss / (k - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, slope_stderr, intercept })
}

/// Monte-Carlo estimate of a cone's statistical dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatDimEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Mean squared norm of projected standard Gaussians, for any projector.
/// Trial `t` draws `dim` standard normals from the `(seed, t)` stream.
pub fn statdim_of<P>(dim: usize, trials: usize, seed: u64, project: P) -> Result<StatDimEstimate>
where
    P: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if trials < 2 {
        return Err(Error::InvalidParameter(format!(
            "statistical dimension estimate needs at least 2 trials, got {trials}"
        )));
    }
    let noise = NoiseModel { sigma: 1.0, master_seed: seed };
    let zero = vec![0.0; dim];
    let mut norms = Vec::with_capacity(trials);
    for t in 0..trials as u64 {
        let z = gen_observation(&zero, &noise, t);
        let p = project(&z)?;
        norms.push(p.iter().map(|v| v * v).sum());
    }
    let mean = pairwise_sum(&norms) / trials as f64;
    let devs: Vec<f64> = norms.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&devs) / (trials - 1) as f64;
    Ok(StatDimEstimate { mean, stderr: (var / trials as f64).sqrt(), trials })
}

/// Statistical dimension of a tree's flow cone, via the sweep projection.
/// The noise model must be unit variance.
pub fn statdim_flow_cone(
    tree: &RootedTree,
    trials: usize,
    noise: &NoiseModel,
) -> Result<StatDimEstimate> {
    if noise.sigma != 1.0 {
        return Err(Error::InvalidParameter(format!(
            "statistical dimension requires unit noise, got sigma {}",
            noise.sigma
        )));
    }
    let cfg = ProjectionConfig::default();
    statdim_of(tree.node_count(), trials, noise.master_seed, |z| {
        let report = dykstra_project_flow(z, tree, &cfg)?;
        if !report.converged {
            return Err(Error::NotConverged {
                sweeps: report.sweeps_used,
                max_violation: report.max_violation,
            });
        }
        Ok(report.point.into_values())
    })
}

/// Statistical dimension of the nonincreasing cone in dimension `d` (no sign
/// constraint), via the pooled fit.
pub fn statdim_monotone(d: usize, trials: usize, seed: u64) -> Result<StatDimEstimate> {
    if d == 0 {
        return Err(Error::EmptyInput);
    }
    statdim_of(d, trials, seed, pava_nonincreasing)
}
