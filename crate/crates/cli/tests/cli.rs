use std::path::Path;
use std::process::{Command, Output};

fn graphlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphlift"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theorem1_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("report");
    let o = graphlift(&[
        "theorem1", "--graph", "complete:6", "--k", "4", "--delta", "0.05", "--trials", "6", "--seed", "7", "--out",
        path_str(&prefix),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("theorem1:"));

    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "trial,seed,max_new_adj,dev_norm_adj,adjacency_bound,exceeded_adj,max_new_lap_dev,dev_norm_lap,laplacian_bound,exceeded_lap"
    );
    assert_eq!(lines.count(), 6);
    assert!(!csv.contains('\r'));

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["summary"]["trials"], 6);
    assert_eq!(json["records"].as_array().unwrap().len(), 6);
}

#[test]
fn reruns_are_byte_identical_across_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let base = ["theorem1", "--graph", "er:9,0.5", "--k", "3", "--trials", "8", "--seed", "11"];
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--out", path_str(&a)]);
    assert!(graphlift(&args).status.success());
    let mut args: Vec<&str> = base.to_vec();
    args.extend(["--sequential", "--out", path_str(&b)]);
    assert!(graphlift(&args).status.success());
    let ca = std::fs::read(dir.path().join("a.csv")).unwrap();
    let cb = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"graph": "cycle:6", "k": 2, "trials": 3, "master_seed": 5, "outputs": {{"csv": "{}"}}}}"#,
            path_str(&csv)
        ),
    )
    .unwrap();
    let o = graphlift(&["theorem1", "--config", path_str(&cfg), "--trials", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
}

#[test]
fn spectrum_of_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "3 3\n1 2\n1 3\n2 3\n").unwrap();
    let o = graphlift(&["spectrum", "--graph-file", path_str(&g)]);
    assert!(o.status.success());
    let out = stdout(&o);
    let a: Vec<f64> = out
        .lines()
        .find(|l| l.starts_with("A:"))
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    for (x, want) in a.iter().zip([-1.0, -1.0, 2.0]) {
        assert!((x - want).abs() < 1e-12);
    }
    let l: Vec<f64> = out
        .lines()
        .find(|l| l.starts_with("L:"))
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    for (x, want) in l.iter().zip([0.0, 1.5, 1.5]) {
        assert!((x - want).abs() < 1e-12);
    }
}

#[test]
fn analyze_prints_deviation_report() {
    let o = graphlift(&["analyze", "--graph", "complete:3", "--k", "2", "--seed", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let json_end = out.rfind('}').unwrap();
    let v: serde_json::Value = serde_json::from_str(&out[..=json_end]).unwrap();
    assert_eq!(v["deviation"]["prop_equality_holds"], true);
    assert_eq!(v["deviation"]["match_failures_adjacency"], 0);
    assert!(v["bounds"]["adjacency_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn lift_then_analyze_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("lift.txt");
    let o = graphlift(&["lift", "--graph", "cycle:5", "--k", "3", "--seed", "9", "--spec-out", path_str(&spec)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("lifted vertices=15"));
    let o = graphlift(&["analyze", "--lift-file", path_str(&spec)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn markov_marginals_corollary_sharpness_run() {
    for args in [
        vec!["markov", "--chain", "random:5,0.6", "--k", "3", "--trials", "3"],
        vec!["marginals", "--graph", "complete:3", "--k", "1", "--trials", "10"],
        vec!["corollary", "--graph", "complete:4", "--ks", "2,2", "--trials", "3", "--delta", "0.1"],
        vec!["sharpness", "--graph", "complete:2", "--k", "2", "--trials", "2"],
    ] {
        let o = graphlift(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with(args[0]));
    }
}

#[test]
fn markov_from_chain_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("chain.txt");
    std::fs::write(&f, "2\n0.5 0.5\n0.25 0.75\n0.3333333333333333 0.6666666666666667\n").unwrap();
    let o = graphlift(&["markov", "--chain-file", path_str(&f), "--k", "2", "--trials", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(&f, "2\n0.5 0.5\n0.25 abc\n0.5 0.5\n").unwrap();
    let o = graphlift(&["markov", "--chain-file", path_str(&f), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn exit_codes() {
    assert_eq!(graphlift(&["bogus"]).status.code(), Some(1));
    assert_eq!(graphlift(&[]).status.code(), Some(1));
    assert_eq!(graphlift(&["--help"]).status.code(), Some(0));
    assert_eq!(graphlift(&["theorem1", "--graph", "complete:5"]).status.code(), Some(1));
    assert_eq!(
        graphlift(&["theorem1", "--graph", "complete:5", "--k", "2", "--delta", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(graphlift(&["theorem1", "--graph", "nonsense:5", "--k", "2"]).status.code(), Some(1));
    assert_eq!(graphlift(&["corollary", "--graph", "complete:5", "--k", "4"]).status.code(), Some(1));
}

#[test]
fn large_runs_need_opt_in() {
    let o = graphlift(&["theorem1", "--graph", "complete:201", "--k", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--allow-large"));
}
