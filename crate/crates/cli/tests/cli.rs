use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let path = dir.path().join(name);
    let path = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend(["-o", &path]);
    let out = run(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn analyze_json(path: &str, extra: &[&str]) -> (i32, Value) {
    let mut args = vec!["analyze", path, "--json"];
    args.extend_from_slice(extra);
    let out = run(&args);
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\n{}",
            stdout(&out),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (code(&out), report)
}

#[test]
fn gen_writes_the_subdivided_theta() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "theta.json", &["theta", "--m", "4", "--subdivide"]);
    let g: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(g["vertices"].as_array().unwrap().len(), 6);
    assert_eq!(g["edges"].as_array().unwrap().len(), 8);
}

#[test]
fn theta_four_is_a_genus_three_surface() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "theta.json", &["theta", "--m", "4", "--subdivide"]);
    let (status, r) = analyze_json(&path, &["--n", "3"]);
    assert_eq!(status, 0);
    assert_eq!(r["euler_characteristic"], -4);
    assert_eq!(r["f_vector"], serde_json::json!([20, 48, 24]));
    assert_eq!(r["surface"]["genus"], 3);
    assert_eq!(r["surface"]["orientable"], true);
    assert_eq!(r["homology"]["betti"], serde_json::json!([1, 6, 1]));
}

#[test]
fn four_cycle_has_four_vertices_and_four_edges() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "c4.json", &["cycle", "--k", "4"]);
    let (status, r) = analyze_json(&path, &["--n", "3"]);
    assert_eq!(status, 0);
    assert_eq!(r["f_vector"], serde_json::json!([4, 4]));
    assert_eq!(r["admissibility"]["ok"], true);
}

#[test]
fn inadmissible_graph_is_a_warning() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "c3.json", &["cycle", "--k", "3"]);
    let (status, r) = analyze_json(&path, &["--n", "3"]);
    assert_eq!(status, 0);
    assert_eq!(r["admissibility"]["ok"], false);
    assert!(r["warnings"][0]
        .as_str()
        .unwrap()
        .contains("not admissible"));
    assert_eq!(r["flag"]["ok"], true);
}

#[test]
fn pulsar_split_at_eight() {
    let dir = TempDir::new().unwrap();
    let path = gen(
        &dir,
        "p.json",
        &["pulsar", "--m", "4", "--n1", "1", "--subdivide"],
    );
    let (status, r) = analyze_json(&path, &["--morse", "pulsar", "--cut", "8"]);
    assert_eq!(status, 0);
    let cert = &r["morse"]["certificate"];
    assert_eq!(cert["kind"], "split");
    assert_eq!(cert["ok"], true);
    assert_eq!(cert["sublevel_f_vector"], serde_json::json!([20, 48, 24]));
    assert_eq!(cert["rank_free_factor"], 6);
    assert_eq!(r["morse"]["morse_euler_sum"], r["euler_characteristic"]);
}

#[test]
fn failed_wedge_certificate_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "s.json", &["sun", "--rays", "0,0,0", "--subdivide"]);
    let (status, r) = analyze_json(&path, &["--morse", "sun"]);
    assert_eq!(status, 1);
    let cert = &r["morse"]["certificate"];
    assert_eq!(cert["kind"], "wedge");
    assert_eq!(cert["ok"], false);
}

#[test]
fn heights_from_a_file_by_label() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "c4.json", &["cycle", "--k", "4"]);
    let heights = dir.path().join("h.json");
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let labels: Vec<&str> = g["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["label"].as_str().unwrap())
        .collect();
    let body: Vec<String> = labels
        .iter()
        .zip([0, 2, 4, 2])
        .map(|(l, h)| format!("\"{l}\": {h}"))
        .collect();
    std::fs::write(&heights, format!("{{{}}}", body.join(","))).unwrap();
    let (status, r) = analyze_json(&path, &["--morse", heights.to_str().unwrap()]);
    assert_eq!(status, 0);
    assert_eq!(r["morse"]["certificate"]["ok"], true);
    assert_eq!(r["morse"]["certificate"]["free_rank"], 1);
}

#[test]
fn dot_input_is_accepted() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("k.dot");
    std::fs::write(&path, "graph { a -- b -- c -- d -- a; }").unwrap();
    let (status, r) = analyze_json(path.to_str().unwrap(), &["--n", "2"]);
    assert_eq!(status, 0);
    assert_eq!(r["input"]["vertices"], 4);
    assert_eq!(r["euler_characteristic"], 0);
}

#[test]
fn output_is_deterministic_apart_from_timings() {
    let dir = TempDir::new().unwrap();
    let path = gen(&dir, "t.json", &["theta", "--m", "3", "--subdivide"]);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timings_ms");
        v
    };
    let (_, a) = analyze_json(&path, &["--emit", "complex"]);
    let (_, b) = analyze_json(&path, &["--emit", "complex"]);
    assert!(a["complex"].is_object());
    assert_eq!(strip(a), strip(b));
}

#[test]
fn reproduce_c6_passes() {
    let out = run(&["reproduce", "c6-example"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn reproduce_reports_failure_with_exit_one() {
    let out = run(&["reproduce", "sun-freeness", "--sun-n-max", "2", "--json"]);
    assert_eq!(code(&out), 1);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["pass"], false);
    assert!(r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["pass"] == false));
}

#[test]
fn bad_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["analyze", missing.to_str().unwrap()])), 2);

    let broken = dir.path().join("broken.dot");
    std::fs::write(&broken, "graph { a -- }").unwrap();
    assert_eq!(code(&run(&["analyze", broken.to_str().unwrap()])), 2);

    assert_eq!(code(&run(&["gen", "theta"])), 2);
    assert_eq!(code(&run(&["reproduce", "nonsense"])), 2);
    assert_eq!(
        code(&run(&["reproduce", "theta4-surface", "--m-max", "99"])),
        2
    );

    let theta = dir.path().join("t.json");
    assert_eq!(
        code(&run(&[
            "gen",
            "theta",
            "--m",
            "3",
            "-o",
            theta.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        code(&run(&[
            "analyze",
            theta.to_str().unwrap(),
            "--morse",
            "sun"
        ])),
        2
    );
}

#[test]
fn collapse_budget_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let path = gen(
        &dir,
        "p.json",
        &["pulsar", "--m", "3", "--n1", "1", "--subdivide"],
    );
    let out = Command::new(env!("CARGO_BIN_EXE_confspace"))
        .args(["analyze", &path, "--morse", "pulsar", "--cut", "8"])
        .env("CONFSPACE_COLLAPSE_BUDGET", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("CONFSPACE_COLLAPSE_BUDGET"));
}
