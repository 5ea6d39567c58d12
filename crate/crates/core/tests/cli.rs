use std::path::PathBuf;

use graph_dilation::cli::{run, Outcome};
use graph_dilation::problem::Problem;

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graph-dilation-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn cli(args: &[&str]) -> Outcome {
    run(std::iter::once("graph-dilation").chain(args.iter().copied()))
}

#[test]
fn validate_good_files() {
    for f in ["cuntz2_zero.json", "flip_z2.json", "cuntz2_bucket_flip.json", "truncated.json"] {
        let out = cli(&["validate", &data(f)]);
        assert_eq!(out.exit, 0, "{f}:\n{}", out.output);
    }
}

#[test]
fn validate_flags_non_unitary_bucket() {
    let out = cli(&["validate", &data("bad_bucket.json")]);
    assert_eq!(out.exit, 1, "{}", out.output);
    assert!(out.output.contains("FAIL") || out.output.contains("fail"));
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(cli(&["validate", "/nonexistent/problem.json"]).exit, 2);
    let bad = scratch("broken.json");
    std::fs::write(&bad, "{\"graph\": ").unwrap();
    assert_eq!(cli(&["validate", bad.to_str().unwrap()]).exit, 2);
    assert_eq!(cli(&["frobnicate"]).exit, 2);
    assert_eq!(cli(&["validate", &data("flip_z2.json"), "--tol", "-1"]).exit, 2);
}

#[test]
fn dimension_cap_exits_3() {
    let out = cli(&["dilate", &data("cuntz2_zero.json"), "--mode", "isometric", "--steps", "6", "--max-dim", "8"]);
    assert_eq!(out.exit, 3, "{}", out.output);
}

#[test]
fn dilate_modes_pass() {
    for mode in ["isometric", "ck", "cp"] {
        let out = cli(&["dilate", &data("flip_z2.json"), "--mode", mode, "--steps", "2"]);
        assert_eq!(out.exit, 0, "{mode}:\n{}", out.output);
    }
}

#[test]
fn dilate_writes_a_loadable_result() {
    let path = scratch("dilated.json");
    let out = cli(&["dilate", &data("cuntz2_bucket_flip.json"), "--mode", "cp", "--out", path.to_str().unwrap()]);
    assert_eq!(out.exit, 0, "{}", out.output);
    let problem = Problem::load(&path).unwrap();
    assert!(problem.representation.is_some());
    assert_eq!(cli(&["validate", path.to_str().unwrap()]).exit, 0);
}

#[test]
fn induce_round_trips_through_validate() {
    let path = scratch("induced.json");
    let out = cli(&["induce", &data("flip_z2.json"), "--out", path.to_str().unwrap()]);
    assert_eq!(out.exit, 0, "{}", out.output);
    assert_eq!(cli(&["validate", path.to_str().unwrap()]).exit, 0);
}

#[test]
fn records_are_json_lines() {
    let out = cli(&["validate", &data("flip_z2.json"), "--format", "records"]);
    assert_eq!(out.exit, 0);
    let mut saw_result = false;
    for line in out.output.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap_or_else(|e| panic!("{line}: {e}"));
        assert!(v.is_object());
        saw_result |= v.get("type").and_then(|k| k.as_str()) == Some("result");
    }
    assert!(saw_result, "{}", out.output);
}

#[test]
fn counterexample_default_passes() {
    let out = cli(&["counterexample"]);
    assert_eq!(out.exit, 0, "{}", out.output);
    assert!(out.output.contains("0.592927061282"));
}

#[test]
fn counterexample_at_low_degree_reports_residual() {
    let out = cli(&["counterexample", "--degree", "2"]);
    assert_eq!(out.exit, 1, "{}", out.output);
}
