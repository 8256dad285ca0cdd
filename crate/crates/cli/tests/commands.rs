use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sho_cli::algebra_file::AlgebraFile;
use sho_cli::commands::dump_structure_constants;
use sho_cli::session::Session;

fn sho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sho"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("sho runs")
}

fn code(args: &[&str]) -> i32 {
    sho(args).status.code().unwrap_or(-1)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn invalid_parameters_are_usage_errors() {
    assert_eq!(code(&["build", "--n", "1", "--p", "3"]), 2);
    assert_eq!(code(&["build", "--n", "2", "--p", "2"]), 2);
    assert_eq!(code(&["build", "--n", "2", "--p", "9"]), 2);
    assert_eq!(code(&["build", "--n", "2", "--p", "3", "--t", "1,0"]), 2);
    assert_eq!(code(&["build", "--n", "2", "--p", "3", "--t", "1,1,1"]), 2);
    assert_eq!(code(&["verify", "--suite", "nonsense", "--n", "2", "--p", "3"]), 2);
    assert_eq!(code(&["verify", "--suite", "identities"]), 2);
    assert_eq!(code(&["verify", "--algebra", "/nonexistent/alg.json"]), 2);
}

#[test]
fn oversized_truncations_are_infeasible() {
    assert_eq!(code(&["build", "--n", "2", "--p", "3", "--t", "9,9"]), 3);
}

#[test]
fn malformed_algebra_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alg.json");
    assert_eq!(
        code(&["build", "--n", "2", "--p", "3", "--out", path.to_str().unwrap()]),
        0
    );
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(
        &path,
        text.replacen("\"format_version\": 1", "\"format_version\": 2", 1),
    )
    .unwrap();
    let out = sho(&["dump-sc", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("format_version"));
}

#[test]
fn build_reports_degenerate_algebras_and_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alg.json");
    let out = sho(&["build", "--n", "2", "--p", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["degenerate"], true);
    assert_eq!(summary["dims"]["ho"], 35);
    assert_eq!(summary["dims"]["sho"], 14);
    let file = json(&path);
    assert_eq!(file["format_version"], 1);
    assert_eq!(file["t"], serde_json::json!([1, 1]));
}

#[test]
fn saved_files_reload_to_the_same_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alg.json");
    let built = Session::build(2, 5, &[1, 1], 0).unwrap();
    built.file().save(&path).unwrap();
    let loaded = Session::load(&path, 0).unwrap();
    assert_eq!(loaded.tensor(), built.tensor());
    assert_eq!(loaded.file(), built.file());
    assert_eq!(dump_structure_constants(&loaded), dump_structure_constants(&built));
    let again = AlgebraFile::load(&path).unwrap();
    assert_eq!(again.to_canonical_string(), std::fs::read_to_string(&path).unwrap());
}

#[test]
fn dump_lists_every_structure_constant() {
    let out = sho(&["dump-sc", "--n", "2", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# n=2 p=3 t=1,1 dim=14"));
    let session = Session::build(2, 3, &[1, 1], 0).unwrap();
    let rows: Vec<Vec<u32>> = lines
        .map(|l| l.split(' ').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), session.tensor().nnz());
    for r in rows {
        let c = session.tensor().coeff(r[0] as usize, r[1] as usize, r[2] as usize);
        assert_eq!(c.value(), r[3]);
    }
}

#[test]
fn identities_pass_on_the_smallest_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let args = ["verify", "--suite", "identities", "--n", "2", "--p", "3", "--t", "1,1"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", report.to_str().unwrap()]);
    assert_eq!(code(&with_out), 0);
    let r = json(&report);
    assert_eq!(r["passed"], true);
    assert_eq!(r["violations"], 0);
    assert_eq!(r["config"]["suite"], "identities");
    assert!(r["config"].get("out").is_none());
}

#[test]
fn theorem_report_records_both_parities() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let args = [
        "verify",
        "--suite",
        "theorem",
        "--n",
        "3",
        "--p",
        "3",
        "--out",
        report.to_str().unwrap(),
    ];
    assert_eq!(code(&args), 0);
    let r = json(&report);
    assert_eq!(r["theorem"]["even_dim"], 1);
    assert_eq!(r["theorem"]["odd_dim"], 0);
    assert_eq!(r["theorem"]["mode"], "blocked");
    assert!(r["theorem"]["lambdas"][0].is_u64());
}

#[test]
fn weights_table_matches_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("weights.json");
    assert_eq!(
        code(&["weights", "--n", "2", "--p", "3", "--out", report.to_str().unwrap()]),
        0
    );
    let r = json(&report);
    let entries = r["weights"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 35);
    for e in entries {
        assert_eq!(e["measured"], e["closed_form"]);
    }
}

#[test]
fn bider_modes_agree_on_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for mode in ["dense", "blocked"] {
        let path = dir.path().join(format!("{mode}.json"));
        let args = [
            "bider",
            "--n",
            "2",
            "--p",
            "3",
            "--parity",
            "even",
            "--mode",
            mode,
            "--out",
            path.to_str().unwrap(),
        ];
        assert_eq!(code(&args), 0);
        reports.push(json(&path));
    }
    for r in &reports {
        let solve = &r["solves"][0];
        assert_eq!(solve["nullspace_dim"], 1);
        assert_eq!(solve["verification"], "verified");
        assert!(solve["lambdas"][0].is_u64());
    }
    assert_eq!(reports[0]["solves"][0]["lambdas"], reports[1]["solves"][0]["lambdas"]);
}

#[test]
fn odd_biderivations_vanish_at_rank_three() {
    let out = sho(&["bider", "--n", "3", "--p", "3", "--parity", "odd"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["solves"][0]["nullspace_dim"], 0);
    assert_eq!(r["solves"][0]["lambdas"], serde_json::json!([]));
}
