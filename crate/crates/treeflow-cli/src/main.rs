//! `treeflow`: denoise and analyze flows on rooted trees from the command
//! line. Subcommands cover tree generation, cone projection, Monte-Carlo
//! risk sweeps, statistical dimension estimates, and covering nets.
//!
//! Every command exits 0 on success and nonzero with a one-line stderr
//! message on failure; output files are written atomically so a failing run
//! leaves nothing partial behind.

mod config;
mod runner;
mod svg;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use treeflow::fileio::{atomic_write, read_flow_csv, read_tree_json, write_flow_csv, write_tree_json};
use treeflow::{
    build_kite, build_maurey_net, cover_radius_check, dykstra_project_flow, qp_project_exact,
    statdim_flow_cone, statdim_monotone, NoiseModel, ProjectionConfig, StatDimEstimate,
};

#[derive(Parser)]
#[command(name = "treeflow", version, about = "Denoising flows on rooted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Dykstra,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Write a kite tree (root with ceil(n^alpha) paths) as parent-array JSON.
    GenTree {
        /// Size parameter of the kite family.
        #[arg(long)]
        n: usize,
        /// Interpolation exponent in [0, 1]: 0 is a path, 1 is a star.
        #[arg(long)]
        alpha: f64,
        /// Output JSON path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Project an observation file onto a tree's flow cone.
    Project {
        /// Tree JSON path.
        #[arg(long)]
        tree: PathBuf,
        /// Input CSV of per-node values (header `node,value`).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output CSV for the projected flow.
        #[arg(long)]
        out: PathBuf,
        /// Solver: the sweep method, or the active-set oracle (small trees).
        #[arg(long, value_enum, default_value_t = Method::Dykstra)]
        method: Method,
        /// Optional CSV path for solver diagnostics; stdout when omitted.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
        /// Sweep cap for the iterative method.
        #[arg(long, default_value_t = ProjectionConfig::default().max_sweeps)]
        max_sweeps: usize,
    },
    /// Run the Monte-Carlo risk sweep described by a config file.
    Simulate {
        /// Config path (flat `key = value` lines; see the README).
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate a cone's statistical dimension by projecting Gaussians.
    Statdim {
        /// Tree JSON path: use that tree's flow cone.
        #[arg(long, conflicts_with = "monotone")]
        tree: Option<PathBuf>,
        /// Dimension d: use the nonincreasing cone in R^d instead.
        #[arg(long)]
        monotone: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV path (header `trials,mean,stderr`).
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate the leak-quantized covering net of budget-V flows.
    Net {
        /// Tree JSON path.
        #[arg(long)]
        tree: PathBuf,
        /// Root budget V of the flows being covered.
        #[arg(long = "V")]
        budget: f64,
        /// Quantization granularity m: leaks move in steps of V/m.
        #[arg(long)]
        m: usize,
        /// Output CSV path (header `element,node,value`).
        #[arg(long)]
        out: PathBuf,
        /// Also sample random flows and report the worst net distance.
        #[arg(long)]
        check_radius: bool,
        /// Sample count for --check-radius.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Seed for --check-radius sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenTree { n, alpha, out } => {
            let (tree, spec) = build_kite(n, alpha)?;
            write_tree_json(&out, &tree)?;
            println!(
                "wrote {}: {} paths of {} nodes, {} nodes total",
                out.display(),
                spec.m,
                spec.l,
                spec.node_count()
            );
            Ok(())
        }
        Command::Project { tree, input, out, method, diagnostics, max_sweeps } => {
            let tree = read_tree_json(&tree)?;
            let y = read_flow_csv(&input)?;
            let (flow, report_csv) = match method {
                Method::Dykstra => {
                    let cfg = ProjectionConfig { max_sweeps, ..ProjectionConfig::default() };
                    let report = dykstra_project_flow(y.values(), &tree, &cfg)?;
                    if !report.converged {
                        bail!(
                            "projection did not converge in {} sweeps (max violation {:e})",
                            report.sweeps_used,
                            report.max_violation
                        );
                    }
                    let csv = report.to_csv();
                    (report.point, csv)
                }
                Method::Exact => {
                    let flow = qp_project_exact(y.values(), &tree)?;
                    (flow, "sweeps,max_violation,converged\n0,0e0,true\n".to_string())
                }
            };
            write_flow_csv(&out, &flow)?;
            match diagnostics {
                Some(path) => atomic_write(&path, report_csv.as_bytes())?,
                None => print!("{report_csv}"),
            }
            Ok(())
        }
        Command::Simulate { config } => {
            let config = config::parse_config(&config)?;
            runner::run_simulate(&config)
        }
        Command::Statdim { tree, monotone, trials, seed, out } => {
            let estimate: StatDimEstimate = match (tree, monotone) {
                (Some(path), None) => {
                    let tree = read_tree_json(&path)?;
                    let noise = NoiseModel { sigma: 1.0, master_seed: seed };
                    statdim_flow_cone(&tree, trials, &noise)?
                }
                (None, Some(d)) => statdim_monotone(d, trials, seed)?,
                _ => bail!("pass exactly one of --tree or --monotone"),
            };
            let csv = format!(
                "trials,mean,stderr\n{},{},{}\n",
                estimate.trials, estimate.mean, estimate.stderr
            );
            atomic_write(&out, csv.as_bytes())?;
            println!(
                "statistical dimension estimate {} (stderr {}) over {} trials",
                estimate.mean, estimate.stderr, estimate.trials
            );
            Ok(())
        }
        Command::Net { tree, budget, m, out, check_radius, samples, seed } => {
            let tree = read_tree_json(&tree)?;
            let net = build_maurey_net(&tree, budget, m)?;
            let mut csv = String::from("element,node,value\n");
            for (idx, element) in net.elements().iter().enumerate() {
                for (node, value) in element.values().iter().enumerate() {
                    csv.push_str(&format!("{idx},{node},{value}\n"));
                }
            }
            atomic_write(&out, csv.as_bytes())?;
            println!("wrote {}: {} elements", out.display(), net.len());
            if check_radius {
                let report = cover_radius_check(&net, &tree, samples, seed)
                    .context("cover radius audit failed")?;
                println!("samples,max_min_sq_dist,bound,holds");
                println!(
                    "{},{},{},{}",
                    report.samples,
                    report.max_min_sq_dist,
                    report.bound,
                    report.holds()
                );
            }
            Ok(())
        }
    }
}
