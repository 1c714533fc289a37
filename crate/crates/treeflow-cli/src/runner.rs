//! Orchestration of a configured simulation run: build the trees, run every
//! (size, estimator) cell, then emit the results CSV, the exponent CSV, and
//! the risk plot. Trials fan out across a worker pool; all file writes stay
//! on this thread and go through atomic renames, so a failed run leaves no
//! partial outputs.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use treeflow::fileio::{atomic_write, read_flow_csv, read_tree_json};
use treeflow::{
    build_kite, fit_exponent, simulate_risk_threaded, worst_case_flow, EstimatorSpec, FlowVector,
    KiteSpec, NoiseModel, RootedTree,
};

use crate::config::{ExperimentConfig, FlowSource, TreeSource};
use crate::svg::{render_svg, Series};

/// Worker count: the `TREEFLOW_THREADS` override if set, else whatever the
/// host reports.
pub fn thread_count() -> Result<usize> {
    if let Ok(raw) = std::env::var("TREEFLOW_THREADS") {
        let n: usize = raw
            .parse()
            .with_context(|| format!("bad TREEFLOW_THREADS value {raw:?}"))?;
        if n == 0 {
            bail!("TREEFLOW_THREADS must be at least 1");
        }
        return Ok(n);
    }
    Ok(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

struct Instance {
    tree: RootedTree,
    kite: Option<KiteSpec>,
}

fn build_instances(config: &ExperimentConfig) -> Result<Vec<Instance>> {
    match &config.tree {
        TreeSource::Kite { n_list, alpha } => n_list
            .iter()
            .map(|&n| {
                let (tree, spec) = build_kite(n, *alpha)?;
                Ok(Instance { tree, kite: Some(spec) })
            })
            .collect(),
        TreeSource::File(path) => {
            let tree = read_tree_json(path)?;
            Ok(vec![Instance { tree, kite: None }])
        }
    }
}

fn signal_for(config: &ExperimentConfig, inst: &Instance) -> Result<FlowVector> {
    match config.flow {
        FlowSource::WorstCase => {
            let kite = inst.kite.as_ref().expect("worst_case requires kite config");
            Ok(worst_case_flow(kite))
        }
        FlowSource::Zero => Ok(FlowVector::zeros(inst.tree.node_count())),
        FlowSource::File => {
            let path = config.flow_file.as_ref().expect("flow = file requires flow_file");
            let flow = read_flow_csv(path)?;
            if flow.len() != inst.tree.node_count() {
                bail!(
                    "flow file {} has {} nodes, tree has {}",
                    path.display(),
                    flow.len(),
                    inst.tree.node_count()
                );
            }
            if !flow.is_feasible(&inst.tree, treeflow::flow::DEFAULT_FEASIBILITY_TOL)? {
                bail!("flow file {} is not feasible on this tree", path.display());
            }
            Ok(flow)
        }
    }
}

pub fn run_simulate(config: &ExperimentConfig) -> Result<()> {
    let threads = thread_count()?;
    let instances = build_instances(config)?;
    let alpha_label = match &config.tree {
        TreeSource::Kite { alpha, .. } => format!("{alpha}"),
        TreeSource::File(_) => "nan".to_string(),
    };
    let noise = NoiseModel::new(config.sigma, config.master_seed)?;

    let mut results = String::from("n,alpha,estimator,sigma,trials,mean_sse,stderr_sse\n");
    // points[estimator] collects (node count, mean sse) in size order.
    let mut points: Vec<Vec<(f64, f64)>> = vec![Vec::new(); config.estimators.len()];

    for inst in &instances {
        let mu = signal_for(config, inst)?;
        let n_nodes = inst.tree.node_count();
        for (e_idx, &kind) in config.estimators.iter().enumerate() {
            let spec = EstimatorSpec {
                kind,
                budget: config.budget,
                net_granularity: config.net_granularity,
                projection: config.projection,
            };
            let stats =
                simulate_risk_threaded(&inst.tree, &mu, &spec, &noise, config.trials, threads)
                    .with_context(|| format!("estimator {kind} on n = {n_nodes}"))?;
            writeln!(
                results,
                "{},{},{},{},{},{},{}",
                n_nodes,
                alpha_label,
                kind,
                config.sigma,
                stats.trials_used,
                stats.mean_sse,
                stats.stderr_sse
            )
            .unwrap();
            points[e_idx].push((n_nodes as f64, stats.mean_sse));
        }
    }

    // Exponent rows and plot series cover the estimators whose curves can be
    // fitted on log axes: at least three sizes, all values positive.
    let mut exponents = String::from("alpha,estimator,slope,slope_stderr,intercept\n");
    let mut series = Vec::new();
    for (e_idx, &kind) in config.estimators.iter().enumerate() {
        let pts = &points[e_idx];
        if pts.iter().any(|&(_, v)| !(v > 0.0)) {
            continue;
        }
        let fit = match fit_exponent(pts) {
            Ok(fit) => {
                writeln!(
                    exponents,
                    "{},{},{},{},{}",
                    alpha_label, kind, fit.slope, fit.slope_stderr, fit.intercept
                )
                .unwrap();
                Some(fit)
            }
            Err(_) => None,
        };
        series.push(Series {
            label: format!("{kind} (alpha {alpha_label})"),
            points: pts.clone(),
            fit,
        });
    }

    std::fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("cannot create {}", config.out_dir.display()))?;
    for (name, bytes) in [("results.csv", results.as_bytes()), ("exponents.csv", exponents.as_bytes())] {
        let path = config.out_dir.join(name);
        atomic_write(&path, bytes)?;
        println!("wrote {}", path.display());
    }

    if series.is_empty() {
        println!("skipped risk.svg: no series with positive values to plot");
    } else {
        let svg = render_svg(&series, "mean squared error vs size")?;
        let path = config.out_dir.join("risk.svg");
        atomic_write(&path, svg.as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
