//! Finite nets over bounded-root feasible flows, built by rounding leaks to a
//! grid, plus the piecewise-constant approximation of monotone sequences.
//!
//! A net element scales an integer leak pattern summing to at most `m` by
//! `budget/m`. There are exactly C(n+m, m) such patterns over n nodes, and
//! every feasible flow with root at most `budget` has a net element within
//! squared distance `budget^2 * (height+1) / m`, the height counted in nodes
//! so a root-only tree still carries one level.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::flow::{leaks_to_flow, FlowVector, LeakVector};
use crate::tree::RootedTree;

/// Hard cap on net cardinality.
pub const NET_ELEMENT_CAP: u64 = 2_000_000;

/// All flows whose leaks are multiples of `budget/granularity` summing to at
/// most `budget`, in colexicographic pattern order.
#[derive(Debug, Clone)]
pub struct MaureyNet {
    budget: f64,
    granularity: usize,
    elements: Vec<FlowVector>,
}

impl MaureyNet {
    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn granularity(&self) -> usize {
        self.granularity
    }

    pub fn elements(&self) -> &[FlowVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// C(n, k) saturating at `cap + 1` so callers only learn whether the cap
/// would be exceeded.
fn binomial_capped(n: u64, k: u64, cap: u128) -> u128 {
    let k = k.min(n - k);
    let mut res: u128 = 1;
    for i in 1..=k {
        res = match res.checked_mul((n - k + i) as u128) {
            Some(v) => v / i as u128,
            None => return cap + 1,
        };
        if res > cap {
            return cap + 1;
        }
    }
    res
}

/// Builds the net for `tree` with root budget `budget` and `granularity`
/// rounding steps. Cardinality is checked against `NET_ELEMENT_CAP` before
/// any element is materialized.
pub fn build_maurey_net(
    tree: &RootedTree,
    budget: f64,
    granularity: usize,
) -> Result<MaureyNet> {
    if !(budget >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "net budget must be nonnegative, got {budget}"
        )));
    }
    if granularity == 0 {
        return Err(Error::InvalidParameter(
            "net granularity must be at least 1".into(),
        ));
    }
    let n = tree.node_count() as u64;
    let m = granularity as u64;
    let count = binomial_capped(n + m, m, NET_ELEMENT_CAP as u128);
    if count > NET_ELEMENT_CAP as u128 {
        return Err(Error::NetTooLarge { elements: count, cap: NET_ELEMENT_CAP });
    }

    let step = budget / granularity as f64;
    let n = tree.node_count();
    let mut elements = Vec::with_capacity(count as usize);
    let mut pattern = vec![0usize; n];
    let mut sum = 0usize;
    loop {
        let leaks: Vec<f64> = pattern.iter().map(|&i| step * i as f64).collect();
        let leaks = LeakVector::new(leaks).expect("grid leaks are nonnegative");
        elements.push(leaks_to_flow(&leaks, tree)?);

        // Colex successor: bump the first coordinate while budget remains,
        // otherwise clear the lowest nonzero prefix and carry one step up.
        if sum < granularity {
            pattern[0] += 1;
            sum += 1;
        } else {
            let j = pattern.iter().position(|&v| v > 0).unwrap();
            if j + 1 >= n {
                break;
            }
            sum -= pattern[j] - 1;
            pattern[j] = 0;
            pattern[j + 1] += 1;
        }
    }
    debug_assert_eq!(elements.len() as u128, count);

    Ok(MaureyNet { budget, granularity, elements })
}

/// Outcome of a random cover-radius audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverRadiusReport {
    pub samples: usize,
    pub max_min_sq_dist: f64,
    /// The guarantee `budget^2 * (height+1) / granularity`.
    pub bound: f64,
}

impl CoverRadiusReport {
    pub fn holds(&self) -> bool {
        self.max_min_sq_dist <= self.bound
    }
}

/// Samples random feasible flows with root at most the net budget (leaks
/// i.i.d. uniform, rescaled to a uniform total budget) and reports the worst
/// squared distance to the net.
pub fn cover_radius_check(
    net: &MaureyNet,
    tree: &RootedTree,
    samples: usize,
    seed: u64,
) -> Result<CoverRadiusReport> {
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    if net.elements[0].len() != tree.node_count() {
        return Err(Error::LengthMismatch {
            expected: tree.node_count(),
            got: net.elements[0].len(),
        });
    }
    let n = tree.node_count();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let mut leaks: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = leaks.iter().sum();
        let target = net.budget * rng.random::<f64>();
        if total > 0.0 {
            let scale = target / total;
            for v in &mut leaks {
                *v *= scale;
            }
        }
        let flow = leaks_to_flow(&LeakVector::new(leaks).unwrap(), tree)?;
        let nearest = net
            .elements
            .iter()
            .map(|e| e.sq_dist(flow.values()))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    let bound = net.budget * net.budget * (tree.height() + 1) as f64 / net.granularity as f64;
    Ok(CoverRadiusReport { samples, max_min_sq_dist: worst, bound })
}

/// Rounds a nonincreasing sequence down to few values: keep the running
/// anchor until the sequence drops more than `eps` below it, then re-anchor.
/// The result is nonincreasing, starts at the first entry, stays within `eps`
/// of the input pointwise, and uses at most `(theta[0] - theta[n-1])/eps + 1`
/// distinct values.
pub fn piecewise_approx(theta: &[f64], eps: f64) -> Result<Vec<f64>> {
    if theta.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "approximation width must be positive, got {eps}"
        )));
    }
    for i in 1..theta.len() {
        if theta[i] > theta[i - 1] {
            return Err(Error::NotMonotone { index: i });
        }
    }
    let mut anchor = theta[0];
    let mut out = Vec::with_capacity(theta.len());
    for &v in theta {
        if anchor - v > eps {
            anchor = v;
        }
        out.push(anchor);
    }
    Ok(out)
}
