use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn logmoduli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logmoduli"))
        .args(args)
        .env("LOGMODULI_FIXTURES", fixtures())
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("logmoduli-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn group_ranks_of_the_two_line_ghost() {
    let out = logmoduli(&["group", "two_line_ghost.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    assert_eq!(r["kernel_rank"], 1);
    assert_eq!(r["cokernel_rank"], 2);
    assert_eq!(r["characters"].as_array().unwrap().len(), 2);
}

#[test]
fn ob_with_supplied_characters() {
    let out = logmoduli(&["ob", "good_ex2.json", "--characters", "good_ex2_characters.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_of(&out);
    // −a12·a23·a31 / (a13·a32·a21) with the fixture's slopes
    assert_eq!(r["ob"]["values"][0], "7/30-7/30*i");
    assert_eq!(r["ghost"]["o_v0"][0], "-1");
}

#[test]
fn empty_graph_is_an_input_error() {
    let out = logmoduli(&["validate", "empty_graph.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.vertices"));
    assert!(out.stdout.is_empty());
}

#[test]
fn schema_errors_name_the_path() {
    let p = scratch("bad_field.json");
    std::fs::write(&p, r#"{"schema_version": "1", "N": 1, "n": 2, "vertices": [{"id": "v", "stratum": [], "c1_log": "x", "dot": [0]}]}"#).unwrap();
    let out = logmoduli(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertices[0].c1_log"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn expect_trivial_sets_the_exit_code() {
    assert_eq!(logmoduli(&["ob", "bad_ex1.json", "--expect-trivial"]).status.code(), Some(1));
    assert_eq!(logmoduli(&["ob", "bad_ex1.json"]).status.code(), Some(0));
}

#[test]
fn positivity_needs_a_profile() {
    assert_eq!(logmoduli(&["positivity", "g0_a0.json"]).status.code(), Some(2));
    let out = logmoduli(&["positivity", "mc_issue.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["strongly_semi_positive"], false);
}

#[test]
fn missing_file_and_unknown_command() {
    assert_eq!(logmoduli(&["dims", "no_such_file.json"]).status.code(), Some(2));
    assert_eq!(logmoduli(&["solve", "g0_a0.json"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic_under_reordering() {
    let a = logmoduli(&["report", "two_line_ghost.json"]);
    let b = logmoduli(&["report", "two_line_ghost.json"]);
    assert_eq!(a.stdout, b.stdout);

    let text = std::fs::read_to_string(fixtures().join("two_line_ghost.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    for key in ["vertices", "edges", "legs"] {
        doc[key].as_array_mut().unwrap().reverse();
    }
    let p = scratch("reversed.json");
    std::fs::write(&p, serde_json::to_string(&doc).unwrap()).unwrap();
    let c = logmoduli(&["report", p.to_str().unwrap()]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn jobs_do_not_change_the_output() {
    let files = ["two_line_ghost.json", "good_ex1.json", "bad_ex1.json", "mc_dep.json", "g0_a0.json"];
    let mut one = vec!["dims", "--jobs", "1"];
    one.extend(files);
    let mut four = vec!["dims", "--jobs", "4"];
    four.extend(files);
    let (a, b) = (logmoduli(&one), logmoduli(&four));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a).as_array().unwrap().len(), files.len());
}

#[test]
fn worst_status_wins_across_files() {
    let out = logmoduli(&["validate", "g0_a0.json", "empty_graph.json"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json_of(&out);
    assert_eq!(r[0]["report"]["valid"], true);
    assert!(r[1]["error"].as_str().unwrap().contains("$.vertices"));
}

#[test]
fn table_format() {
    let out = logmoduli(&["group", "good_ex2.json", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("kernel_rank") && l.trim_end().ends_with(" 1")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("cokernel_rank") && l.trim_end().ends_with(" 1")));
}

#[test]
fn rt_on_the_coincident_configuration_reports_the_ledger_gap() {
    let out = logmoduli(&["rt", "coincident_nodes_model.json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_of(&out);
    assert_eq!(r["edge_invariant"]["holds"], false);
    assert_eq!(r["edge_invariant"]["corrected_holds"], true);
}

#[test]
fn report_runs_every_applicable_analysis() {
    let out = logmoduli(&["report", "mc_dep_model.json"]);
    let r = json_of(&out);
    for key in ["validate", "group", "dims", "rt"] {
        assert!(r.get(key).is_some(), "{key} missing");
    }
}
