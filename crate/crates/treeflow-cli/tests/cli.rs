//! End-to-end checks of the command-line surface: exit codes, file
//! contracts, and the no-partial-output rule.

use std::path::Path;
use std::process::{Command, Output};

use treeflow::fileio::{read_flow_csv, read_tree_json, write_tree_json};
use treeflow::FlowVector;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_treeflow"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().unwrap();
    assert!(
        out.status.success(),
        "command {args:?} failed\nstderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().unwrap();
    assert!(!out.status.success(), "command {args:?} unexpectedly passed");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(!stderr.trim().is_empty(), "failure must say why on stderr");
    assert_eq!(
        stderr.trim().lines().count(),
        1,
        "diagnostic should be one line, got: {stderr}"
    );
    out
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn gen_tree_builds_stars_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["gen-tree", "--n", "9", "--alpha", "1", "--out", "star.json"], dir.path());
    let star = read_tree_json(&dir.path().join("star.json")).unwrap();
    assert_eq!(star.node_count(), 10);
    assert_eq!(star.children(0).len(), 9);
    assert!((1..10).all(|i| star.is_leaf(i)));

    run_ok(&["gen-tree", "--n", "4", "--alpha", "0", "--out", "path.json"], dir.path());
    let path = read_tree_json(&dir.path().join("path.json")).unwrap();
    assert_eq!(path.node_count(), 5);
    assert!((0..5).all(|i| path.children(i).len() == usize::from(i < 4)));
}

#[test]
fn gen_tree_rejects_bad_alpha_without_output() {
    let dir = tempfile::tempdir().unwrap();
    run_err(&["gen-tree", "--n", "9", "--alpha", "1.5", "--out", "t.json"], dir.path());
    assert!(!dir.path().join("t.json").exists(), "failed run must not leave files");
}

#[test]
fn tree_json_roundtrip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["gen-tree", "--n", "12", "--alpha", "0.5", "--out", "t.json"], dir.path());
    let first = std::fs::read(dir.path().join("t.json")).unwrap();
    let tree = read_tree_json(&dir.path().join("t.json")).unwrap();
    write_tree_json(&dir.path().join("t2.json"), &tree).unwrap();
    let second = std::fs::read(dir.path().join("t2.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn project_matches_the_three_node_star_example() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("star3.json"), "{\"parent\":[-1,0,0]}\n");
    write(&dir.path().join("y.csv"), "node,value\n0,0\n1,1\n2,1\n");
    for method in ["dykstra", "exact"] {
        let out_name = format!("proj_{method}.csv");
        let out = run_ok(
            &["project", "--tree", "star3.json", "--in", "y.csv", "--out", &out_name, "--method", method],
            dir.path(),
        );
        let flow = read_flow_csv(&dir.path().join(&out_name)).unwrap();
        let want = [2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
        for (got, want) in flow.values().iter().zip(want) {
            assert!((got - want).abs() <= 1e-9, "{method}: {got} vs {want}");
        }
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.starts_with("sweeps,max_violation,converged\n"), "{stdout}");
    }
}

#[test]
fn project_returns_feasible_input_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("tree.json"), "{\"parent\":[-1,0,0,1,1,2,2,3,3]}\n");
    let flow = FlowVector::new(vec![6.0, 3.0, 2.0, 1.0, 2.0, 2.0, 0.0, 0.5, 1.0 / 3.0]);
    treeflow::fileio::write_flow_csv(&dir.path().join("in.csv"), &flow).unwrap();
    run_ok(
        &["project", "--tree", "tree.json", "--in", "in.csv", "--out", "out.csv"],
        dir.path(),
    );
    let input = std::fs::read(dir.path().join("in.csv")).unwrap();
    let output = std::fs::read(dir.path().join("out.csv")).unwrap();
    assert_eq!(input, output);
}

#[test]
fn project_diagnostics_go_to_a_file_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("star3.json"), "{\"parent\":[-1,0,0]}\n");
    write(&dir.path().join("y.csv"), "node,value\n0,0\n1,1\n2,1\n");
    run_ok(
        &[
            "project", "--tree", "star3.json", "--in", "y.csv", "--out", "p.csv",
            "--diagnostics", "diag.csv",
        ],
        dir.path(),
    );
    let diag = std::fs::read_to_string(dir.path().join("diag.csv")).unwrap();
    assert!(diag.starts_with("sweeps,max_violation,converged\n"));
    assert!(diag.trim_end().ends_with("true"));
}

#[test]
fn project_exact_rejects_large_trees() {
    let dir = tempfile::tempdir().unwrap();
    let parents: Vec<String> = (0..25).map(|i| (i as i64 - 1).to_string()).collect();
    write(
        &dir.path().join("tree.json"),
        &format!("{{\"parent\":[{}]}}\n", parents.join(",")),
    );
    let rows: String = (0..25).map(|i| format!("{i},1\n")).collect();
    write(&dir.path().join("y.csv"), &format!("node,value\n{rows}"));
    run_err(
        &["project", "--tree", "tree.json", "--in", "y.csv", "--out", "p.csv", "--method", "exact"],
        dir.path(),
    );
    assert!(!dir.path().join("p.csv").exists());
}

#[test]
fn project_rejects_malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("star3.json"), "{\"parent\":[-1,0,0]}\n");
    run_err(
        &["project", "--tree", "star3.json", "--in", "missing.csv", "--out", "p.csv"],
        dir.path(),
    );
    write(&dir.path().join("bad.csv"), "node,value\n0,0\n2,1\n1,1\n");
    run_err(
        &["project", "--tree", "star3.json", "--in", "bad.csv", "--out", "p.csv"],
        dir.path(),
    );
    assert!(!dir.path().join("p.csv").exists());
}

#[test]
fn statdim_monotone_matches_known_values() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["statdim", "--monotone", "1", "--trials", "4000", "--seed", "11", "--out", "d1.csv"],
        dir.path(),
    );
    let d1 = read_statdim(&dir.path().join("d1.csv"));
    assert!((d1.0 - 1.0).abs() <= 4.0 * d1.1, "d=1 estimate {d1:?}");

    run_ok(
        &["statdim", "--monotone", "2", "--trials", "20000", "--seed", "12", "--out", "d2.csv"],
        dir.path(),
    );
    let d2 = read_statdim(&dir.path().join("d2.csv"));
    assert!((d2.0 - 1.5).abs() <= 4.0 * d2.1, "d=2 estimate {d2:?}");
}

#[test]
fn statdim_single_node_tree_is_half() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("one.json"), "{\"parent\":[-1]}\n");
    run_ok(
        &["statdim", "--tree", "one.json", "--trials", "20000", "--seed", "13", "--out", "sd.csv"],
        dir.path(),
    );
    let sd = read_statdim(&dir.path().join("sd.csv"));
    assert!((sd.0 - 0.5).abs() <= 4.0 * sd.1, "single node estimate {sd:?}");
}

#[test]
fn statdim_needs_exactly_one_cone() {
    let dir = tempfile::tempdir().unwrap();
    run_err(&["statdim", "--trials", "100", "--out", "sd.csv"], dir.path());
    assert!(!dir.path().join("sd.csv").exists());
}

fn read_statdim(path: &Path) -> (f64, f64) {
    let text = std::fs::read_to_string(path).unwrap();
    let row = text.lines().nth(1).unwrap();
    let mut parts = row.split(',');
    parts.next().unwrap();
    let mean: f64 = parts.next().unwrap().parse().unwrap();
    let stderr: f64 = parts.next().unwrap().parse().unwrap();
    (mean, stderr)
}

#[test]
fn net_enumerates_the_single_node_case() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("one.json"), "{\"parent\":[-1]}\n");
    let out = run_ok(
        &["net", "--tree", "one.json", "--V", "1", "--m", "1", "--out", "net.csv", "--check-radius"],
        dir.path(),
    );
    let csv = std::fs::read_to_string(dir.path().join("net.csv")).unwrap();
    assert_eq!(csv, "element,node,value\n0,0,0\n1,0,1\n");
    let stdout = String::from_utf8_lossy(&out.stdout);
    let report = stdout
        .lines()
        .skip_while(|l| !l.starts_with("samples,"))
        .nth(1)
        .expect("radius report row");
    assert!(report.ends_with(",true"), "radius bound should hold: {report}");
}

#[test]
fn net_rejects_oversized_enumerations() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["gen-tree", "--n", "30", "--alpha", "0.5", "--out", "t.json"], dir.path());
    run_err(
        &["net", "--tree", "t.json", "--V", "1", "--m", "9", "--out", "net.csv"],
        dir.path(),
    );
    assert!(!dir.path().join("net.csv").exists());
}

#[test]
fn simulate_with_zero_noise_reports_zero_risk() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("sim.conf"),
        "tree = kite\nn_list = 20, 40, 80\nalpha = 0.5\nflow = worst_case\n\
         estimators = lse\nsigma = 0\ntrials = 3\nmaster_seed = 1\nout_dir = out\n",
    );
    run_ok(&["simulate", "--config", "sim.conf"], dir.path());
    let results = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    let mut rows = 0;
    for line in results.lines().skip(1) {
        let mean: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(mean.abs() <= 1e-12, "zero-noise risk should vanish: {line}");
        rows += 1;
    }
    assert_eq!(rows, 3);
    // Nothing is plottable on a log axis, so the plot is skipped.
    let exponents = std::fs::read_to_string(dir.path().join("out/exponents.csv")).unwrap();
    assert_eq!(exponents, "alpha,estimator,slope,slope_stderr,intercept\n");
    assert!(!dir.path().join("out/risk.svg").exists());
}

#[test]
fn simulate_rejects_bad_configs_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("bad.conf"),
        "tree = kite\nn_list = 40, 20\nalpha = 0.5\nestimators = lse\ntrials = 4\nout_dir = out\n",
    );
    run_err(&["simulate", "--config", "bad.conf"], dir.path());
    assert!(!dir.path().join("out").exists(), "failed run must not create outputs");

    write(
        &dir.path().join("unknown.conf"),
        "tree = kite\nn_list = 20, 40\nalpha = 0.5\nestimators = lse\ntrials = 4\nout_dir = out\nfrobnicate = 1\n",
    );
    run_err(&["simulate", "--config", "unknown.conf"], dir.path());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn simulate_rejects_bad_thread_override() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("sim.conf"),
        "tree = kite\nn_list = 20, 40\nalpha = 0.5\nestimators = lse\n\
         sigma = 1\ntrials = 4\nmaster_seed = 1\nout_dir = out\n",
    );
    let out = bin()
        .args(["simulate", "--config", "sim.conf"])
        .current_dir(dir.path())
        .env("TREEFLOW_THREADS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!dir.path().join("out/results.csv").exists());
}
