use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parent array is empty")]
    EmptyParents,
    #[error("entry 0 must be the root sentinel -1, got {0}")]
    RootSentinelMissing(i64),
    #[error("node {node} declares a second root (parent -1)")]
    MultipleRoots { node: usize },
    #[error("node {node} has out-of-range parent {parent}")]
    ParentOutOfRange { node: usize, parent: i64 },
    #[error("cycle detected at node {node}")]
    CycleDetected { node: usize },
    #[error("vector length {got} does not match node count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("kite construction needs n >= 2, got {0}")]
    KiteTooSmall(usize),
    #[error("input sequence is empty")]
    EmptyInput,
    #[error("flow is infeasible at node {node} (violation {violation:e})")]
    InfeasibleFlow { node: usize, violation: f64 },
    #[error("leak vector has negative entry {value} at node {node}")]
    NegativeLeak { node: usize, value: f64 },
    #[error("sequence increases at index {index}")]
    NotMonotone { index: usize },
    #[error("tree is not a canonical kite: {0}")]
    NotKite(&'static str),
    #[error("exact projection supports at most {max} nodes, tree has {nodes}")]
    TreeTooLarge { nodes: usize, max: usize },
    #[error("net would hold {elements} elements, cap is {cap}")]
    NetTooLarge { elements: u128, cap: u64 },
    #[error("net has no elements")]
    EmptyNet,
    #[error("projection did not converge within {sweeps} sweeps (max violation {max_violation:e})")]
    NotConverged { sweeps: usize, max_violation: f64 },
    #[error("{excluded} of {trials} trials excluded, above the 1% cap")]
    TooManyExclusions { excluded: usize, trials: usize },
    #[error("exponent fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("log-log fit requires positive values, got {value} at point {index}")]
    NonPositiveValue { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
