use std::path::Path;
use std::process::{Command, Output};

use kernel_field::graph::Graph;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernel-field"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn solve_on_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["solve", "--graph", "path:8", "--out", out]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let fp = json(&dir.path().join("fixed_point.json"));
    assert_eq!(fp["converged"], true);
    for h in fp["h_star"].as_array().unwrap() {
        assert!((h.as_f64().unwrap() - 0.1547).abs() < 1e-4);
    }
    let st = json(&dir.path().join("stability.json"));
    assert_eq!(st["stable"], true);
    assert!(st["hessian"].is_array());
    let diag = json(&dir.path().join("diagnostics.json"));
    assert!(diag["spectral_entropy"].is_number());
}

#[test]
fn zero_source_gives_the_vacuum() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "solve",
        "--mu2",
        "0",
        "--no-hessian",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let fp = json(&dir.path().join("fixed_point.json"));
    for h in fp["h_star"].as_array().unwrap() {
        assert!((h.as_f64().unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    }
    assert!(json(&dir.path().join("stability.json"))
        .get("hessian")
        .is_none());
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = run(&[
        "solve",
        "--graph",
        "file:/nonexistent/graph.json",
        "--out",
        out,
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/graph.json"));
    assert_eq!(
        run(&["reproduce", "exp9", "--out", out]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["solve", "--sigma2", "-1", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["sweep", "--edge", "0,5", "--out", out]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["graph", "--graph", "path:1", "--out", out])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["solve", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn reproduce_single_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "exp2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let res = json(&dir.path().join("exp2_results.json"));
    assert_eq!(res["passed"], true);
    assert!(dir.path().join("exp2_table.csv").exists());
}

#[test]
fn default_sweep_has_five_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&dir.path().join("sweep_table.csv")), 5);
    assert_eq!(csv_rows(&dir.path().join("sweep_plotdata.csv")), 5);
    assert_eq!(
        csv_rows(&dir.path().join("sweep_plotdata_normalized.csv")),
        5
    );
    let res = json(&dir.path().join("sweep_results.json"));
    assert!(res.is_object());
}

#[test]
fn coupled_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["sweep", "--coupled", "--eps", "1,0.5,0.1", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&dir.path().join("sweep_table.csv")), 3);
    let o = run(&[
        "sweep",
        "--graph",
        "river",
        "--coupled",
        "--require-convergence",
        "--out",
        out,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"graph": "path:6", "source": {"mu2": 0.0}, "solver": {"tol": 1e-10}}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--graph",
        "path:5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        json(&out.join("fixed_point.json"))["h_star"]
            .as_array()
            .unwrap()
            .len(),
        5
    );

    std::fs::write(&cfg, r#"{"grpah": "path:6"}"#).unwrap();
    let o = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn graph_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "graph",
        "--graph",
        "path:8:weaken=2,3,0.3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let g = Graph::read_json(&dir.path().join("graph.json")).unwrap();
    assert_eq!(g, Graph::path(8).unwrap().weaken_edge(2, 3, 0.3).unwrap());
    assert_eq!(csv_rows(&dir.path().join("eigenbasis.csv")), 8);

    // a dumped graph feeds back in as a file
    let path = dir.path().join("graph.json");
    let o = run(&[
        "solve",
        "--graph",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}
