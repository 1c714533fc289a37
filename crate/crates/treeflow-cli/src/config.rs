//! Experiment configuration: a flat `key = value` text file, one pair per
//! line, `#` for comments, lists comma-separated. Unknown and duplicate keys
//! are errors so a typo cannot silently fall back to a default.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use treeflow::{EstimatorKind, ProjectionConfig};

/// Where the tree comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSource {
    /// One kite per entry of `n_list`, all sharing `alpha`.
    Kite { n_list: Vec<usize>, alpha: f64 },
    /// A single tree read from a parent-array JSON file.
    File(PathBuf),
}

/// The signal the noise is added to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowSource {
    WorstCase,
    Zero,
    File,
}

/// A parsed simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub tree: TreeSource,
    pub flow: FlowSource,
    pub flow_file: Option<PathBuf>,
    pub estimators: Vec<EstimatorKind>,
    pub budget: Option<f64>,
    pub net_granularity: Option<usize>,
    pub sigma: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub projection: ProjectionConfig,
}

const KEYS: &[&str] = &[
    "tree",
    "n_list",
    "alpha",
    "tree_file",
    "flow",
    "flow_file",
    "estimators",
    "budget",
    "net_m",
    "sigma",
    "trials",
    "master_seed",
    "out_dir",
    "max_sweeps",
    "primal_tol",
    "change_tol",
];

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let name = path.display();

    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{name}:{lineno}: expected `key = value`, got {line:?}"))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            bail!("{name}:{lineno}: unknown key {key:?}");
        }
        if !seen.insert(key.to_string()) {
            bail!("{name}:{lineno}: duplicate key {key:?}");
        }
        if value.is_empty() {
            bail!("{name}:{lineno}: empty value for {key:?}");
        }
        pairs.push((key.to_string(), value.to_string(), lineno));
    }

    let get = |key: &str| -> Option<&str> {
        pairs
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    };
    let require = |key: &str| -> Result<&str> {
        get(key).ok_or_else(|| anyhow!("{name}: missing required key {key:?}"))
    };

    let tree = match require("tree")? {
        "kite" => {
            let n_list = parse_list::<usize>(require("n_list")?, "n_list")?;
            if n_list.is_empty() {
                bail!("{name}: n_list must not be empty");
            }
            if n_list.windows(2).any(|w| w[0] >= w[1]) {
                bail!("{name}: n_list must be strictly increasing");
            }
            let alpha = parse_one::<f64>(require("alpha")?, "alpha")?;
            if get("tree_file").is_some() {
                bail!("{name}: tree_file conflicts with tree = kite");
            }
            TreeSource::Kite { n_list, alpha }
        }
        "file" => {
            for banned in ["n_list", "alpha"] {
                if get(banned).is_some() {
                    bail!("{name}: {banned} only applies to tree = kite");
                }
            }
            TreeSource::File(PathBuf::from(require("tree_file")?))
        }
        other => bail!("{name}: tree must be `kite` or `file`, got {other:?}"),
    };

    let flow = match get("flow").unwrap_or("worst_case") {
        "worst_case" => FlowSource::WorstCase,
        "zero" => FlowSource::Zero,
        "file" => FlowSource::File,
        other => bail!("{name}: flow must be worst_case, zero, or file, got {other:?}"),
    };
    if flow == FlowSource::WorstCase && !matches!(tree, TreeSource::Kite { .. }) {
        bail!("{name}: flow = worst_case needs tree = kite");
    }
    let flow_file = get("flow_file").map(PathBuf::from);
    match flow {
        FlowSource::File if flow_file.is_none() => {
            bail!("{name}: flow = file needs flow_file")
        }
        FlowSource::File => {}
        _ if flow_file.is_some() => bail!("{name}: flow_file only applies to flow = file"),
        _ => {}
    }

    let mut estimators = Vec::new();
    for part in split_list(require("estimators")?) {
        let kind = EstimatorKind::from_str(&part)
            .map_err(|e| anyhow!("{name}: bad estimators entry: {e}"))?;
        if estimators.contains(&kind) {
            bail!("{name}: estimator {kind} listed twice");
        }
        estimators.push(kind);
    }
    if estimators.is_empty() {
        bail!("{name}: estimators must not be empty");
    }

    let sigma = match get("sigma") {
        Some(v) => parse_one::<f64>(v, "sigma")?,
        None => 1.0,
    };
    if !(sigma >= 0.0) {
        bail!("{name}: sigma must be nonnegative, got {sigma}");
    }
    let trials = parse_one::<usize>(require("trials")?, "trials")?;
    if trials < 2 {
        bail!("{name}: trials must be at least 2, got {trials}");
    }
    let master_seed = match get("master_seed") {
        Some(v) => parse_one::<u64>(v, "master_seed")?,
        None => 0,
    };
    let out_dir = PathBuf::from(require("out_dir")?);

    let defaults = ProjectionConfig::default();
    let projection = ProjectionConfig {
        max_sweeps: match get("max_sweeps") {
            Some(v) => parse_one::<usize>(v, "max_sweeps")?,
            None => defaults.max_sweeps,
        },
        primal_tol: match get("primal_tol") {
            Some(v) => parse_one::<f64>(v, "primal_tol")?,
            None => defaults.primal_tol,
        },
        change_tol: match get("change_tol") {
            Some(v) => parse_one::<f64>(v, "change_tol")?,
            None => defaults.change_tol,
        },
    };

    let budget = match get("budget") {
        Some(v) => Some(parse_one::<f64>(v, "budget")?),
        None => None,
    };
    let net_granularity = match get("net_m") {
        Some(v) => Some(parse_one::<usize>(v, "net_m")?),
        None => None,
    };

    Ok(ExperimentConfig {
        tree,
        flow,
        flow_file,
        estimators,
        budget,
        net_granularity,
        sigma,
        trials,
        master_seed,
        out_dir,
        projection,
    })
}

fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    split_list(value)
        .iter()
        .map(|p| {
            p.parse::<T>()
                .map_err(|e| anyhow!("bad {key} entry {p:?}: {e}"))
        })
        .collect()
}

fn parse_one<T: FromStr>(value: &str, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| anyhow!("bad value for {key}: {value:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn parses_a_full_kite_config() {
        let f = write_config(
            "# risk sweep\n\
             tree = kite\n\
             n_list = 100, 200, 400\n\
             alpha = 0.5\n\
             flow = worst_case\n\
             estimators = lse, zero\n\
             sigma = 1\n\
             trials = 10\n\
             master_seed = 7\n\
             out_dir = /tmp/out\n\
             max_sweeps = 50000\n",
        );
        let cfg = parse_config(f.path()).unwrap();
        assert_eq!(
            cfg.tree,
            TreeSource::Kite { n_list: vec![100, 200, 400], alpha: 0.5 }
        );
        assert_eq!(cfg.flow, FlowSource::WorstCase);
        assert_eq!(cfg.estimators, vec![EstimatorKind::Lse, EstimatorKind::Zero]);
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.projection.max_sweeps, 50_000);
        assert_eq!(cfg.projection.primal_tol, 1e-9);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let f = write_config("tree = kite\nwidget = 3\n");
        let err = parse_config(f.path()).unwrap_err().to_string();
        assert!(err.contains("unknown key"), "{err}");

        let f = write_config("tree = kite\ntree = kite\n");
        let err = parse_config(f.path()).unwrap_err().to_string();
        assert!(err.contains("duplicate key"), "{err}");
    }

    #[test]
    fn rejects_bad_shapes() {
        let cases = [
            ("tree = kite\nn_list = 200, 100\nalpha = 0.5\nestimators = lse\ntrials = 5\nout_dir = o\n", "strictly increasing"),
            ("tree = kite\nn_list = 100\nalpha = 0.5\nestimators = lse\ntrials = 1\nout_dir = o\n", "at least 2"),
            ("tree = file\ntree_file = t.json\nflow = worst_case\nestimators = lse\ntrials = 5\nout_dir = o\n", "needs tree = kite"),
            ("tree = kite\nn_list = 100\nalpha = 0.5\nestimators = lse\ntrials = 5\nout_dir = o\nflow = file\n", "needs flow_file"),
            ("tree = kite\nn_list = 100\nalpha = 0.5\nestimators = bogus\ntrials = 5\nout_dir = o\n", "unknown estimator"),
            ("tree = kite\nn_list = 100\nalpha = 0.5\nestimators = lse\ntrials = 5\nout_dir = o\nsigma = -1\n", "nonnegative"),
        ];
        for (body, needle) in cases {
            let f = write_config(body);
            let err = parse_config(f.path()).unwrap_err().to_string();
            assert!(err.contains(needle), "config {body:?} gave {err}");
        }
    }

    #[test]
    fn missing_equals_reports_line_number() {
        let f = write_config("tree = kite\nn_list\n");
        let err = parse_config(f.path()).unwrap_err().to_string();
        assert!(err.contains(":2:"), "{err}");
    }

    #[test]
    fn defaults_fill_in() {
        let f = write_config(
            "tree = kite\nn_list = 50\nalpha = 1\nestimators = lse\ntrials = 2\nout_dir = o\n",
        );
        let cfg = parse_config(f.path()).unwrap();
        assert_eq!(cfg.sigma, 1.0);
        assert_eq!(cfg.master_seed, 0);
        assert_eq!(cfg.flow, FlowSource::WorstCase);
        assert_eq!(cfg.projection, ProjectionConfig::default());
    }
}
