//! End to end tests against the compiled binary: exit codes, file handling
//! and the table values small enough to state by hand.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn mbqc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbqc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

const K2: &str = r#"{"n": 2, "edges": [[0,1]]}"#;
const K4: &str = r#"{"n": 4, "edges": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#;
const P4: &str = r#"{"n": 4, "edges": [[0,1],[1,2],[2,3]]}"#;
const TRIANGLE: &str = r#"{"n": 3, "edges": [[0,1],[0,2],[1,2]]}"#;
const HADAMARD_CIRCUIT: &str = r#"{
  "qubits": 1,
  "gates": [{"kind": "u", "target": 0, "matrix": [
    [0.7071067811865476, 0], [0.7071067811865476, 0],
    [0.7071067811865476, 0], [-0.7071067811865476, 0]]}],
  "measure": ["z"]
}"#;

#[test]
fn widths_matches_enumeration_on_small_graphs() {
    let dir = TempDir::new().unwrap();
    for (file, text, want) in [
        ("k4.json", K4, (4, 1, 3)),
        ("p4.json", P4, (2, 1, 1)),
        ("k2.json", K2, (1, 1, 1)),
    ] {
        let path = write(dir.path(), file, text);
        let out = mbqc(dir.path(), &["widths", path.to_str().unwrap(), "--check"]);
        let v = stdout_json(&out);
        assert_eq!(v["cc"], want.0, "{file}");
        assert_eq!(v["rwd"], want.1, "{file}");
        assert_eq!(v["twd"], want.2, "{file}");
        assert!(!v["ccTree"].as_array().unwrap().is_empty());
    }
}

#[test]
fn widths_csv_uses_the_documented_columns() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "k4.json", K4);
    let out = mbqc(
        dir.path(),
        &["widths", path.to_str().unwrap(), "--format", "csv"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "n,delta,cc,rwd,twd\n4,3,4,1,3\n");
}

#[test]
fn single_edge_and_triangle_tables_are_uniform() {
    let dir = TempDir::new().unwrap();
    for (file, text, rows, p) in [
        ("k2.json", K2, 4, 0.25),
        ("tri.json", TRIANGLE, 8, 0.125),
    ] {
        let path = write(dir.path(), file, text);
        let out = mbqc(dir.path(), &["simulate", path.to_str().unwrap(), "--check"]);
        let v = stdout_json(&out);
        let table = v["table"].as_array().unwrap();
        assert_eq!(table.len(), rows);
        for row in table {
            let got = row["probability"].as_f64().unwrap();
            assert!((got - p).abs() < 1e-9, "{file}: {got}");
        }
    }
}

#[test]
fn compiled_pattern_reproduces_the_circuit_table() {
    let dir = TempDir::new().unwrap();
    let circuit = write(dir.path(), "h.json", HADAMARD_CIRCUIT);
    let pattern = dir.path().join("h_pattern.json");

    let out = mbqc(
        dir.path(),
        &[
            "compile",
            circuit.to_str().unwrap(),
            "--check",
            "--out",
            pattern.to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&pattern).unwrap()).unwrap();
    assert!(parsed["chains"].is_array());

    // Circuits act on |+...+>, so a single Hadamard lands on |0> exactly.
    for input in [circuit.to_str().unwrap(), pattern.to_str().unwrap()] {
        let out = mbqc(dir.path(), &["simulate", input, "--check"]);
        let v = stdout_json(&out);
        let table = v["table"].as_array().unwrap();
        assert!((table[0]["probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);
        assert!(table[1]["probability"].as_f64().unwrap().abs() < 1e-9);
    }
}

#[test]
fn verify_is_byte_identical_across_reruns() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"families": ["random", "circuit"], "samples": 3, "nMax": 5}"#,
    );
    let mut outputs = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let path = dir.path().join(name);
        let out = mbqc(
            dir.path(),
            &[
                "verify",
                cfg.to_str().unwrap(),
                "--seed",
                "7",
                "--out",
                path.to_str().unwrap(),
            ],
        );
        assert!(
            out.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(fs::read(&path).unwrap());
    }
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn corrupted_widths_fail_verify_with_exit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"families": ["path"], "nMax": 4, "corruptCutRank": true}"#,
    );
    let report = dir.path().join("report.jsonl");
    let out = mbqc(
        dir.path(),
        &[
            "verify",
            cfg.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let text = fs::read_to_string(&report).unwrap();
    assert!(text.contains("false"), "report still written: {text}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("verdict failure"), "stderr: {err}");
}

#[test]
fn tree_cap_overflow_exits_three() {
    let dir = TempDir::new().unwrap();
    let edges: Vec<[usize; 2]> = (0..12)
        .flat_map(|u| ((u + 1)..12).map(move |v| [u, v]))
        .collect();
    let k12 = serde_json::json!({ "n": 12, "edges": edges });
    let path = write(dir.path(), "k12.json", &k12.to_string());
    let out = mbqc(dir.path(), &["widths", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unparseable_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let garbage = write(dir.path(), "bad.json", "not json at all");
    let out = mbqc(dir.path(), &["widths", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let misordered = write(dir.path(), "edge.json", r#"{"n": 2, "edges": [[1,0]]}"#);
    let out = mbqc(dir.path(), &["widths", misordered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_outcome_spec_length_exits_four() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "k2.json", K2);
    let bases = write(dir.path(), "bases.json", r#"["z"]"#);
    let out = mbqc(
        dir.path(),
        &[
            "simulate",
            graph.to_str().unwrap(),
            bases.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn out_files_appear_whole_and_rerun_identically() {
    let dir = TempDir::new().unwrap();
    let graph = write(dir.path(), "k2.json", K2);
    let table = dir.path().join("table.csv");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = mbqc(
            dir.path(),
            &[
                "simulate",
                graph.to_str().unwrap(),
                "--format",
                "csv",
                "--out",
                table.to_str().unwrap(),
            ],
        );
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        runs.push(fs::read(&table).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    assert!(!dir.path().join("table.csv.part").exists());
}

#[test]
fn extraction_trace_dumps_one_pair_on_the_path_cut() {
    let dir = TempDir::new().unwrap();
    let p5 = write(
        dir.path(),
        "p5.json",
        r#"{"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4]]}"#,
    );
    let out = mbqc(
        dir.path(),
        &["extract-pairs", p5.to_str().unwrap(), "--side", "0,1"],
    );
    let v = stdout_json(&out);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 1);
    assert_eq!(v["pairs"][0][0], 1);
    assert_eq!(v["pairs"][0][1], 2);
    let trace = v["trace"].as_array().unwrap();
    for step in trace {
        assert_eq!(step["cut_rank"], 1);
    }

    let out = mbqc(
        dir.path(),
        &[
            "extract-pairs",
            p5.to_str().unwrap(),
            "--side",
            "0,1",
            "--format",
            "csv",
        ],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("step,label,cut_rank,edges\n"));
}

#[test]
fn ttn_bond_dims_track_rank_width() {
    let dir = TempDir::new().unwrap();
    let c5 = write(
        dir.path(),
        "c5.json",
        r#"{"n": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[0,4]]}"#,
    );
    let out = mbqc(dir.path(), &["ttn", c5.to_str().unwrap(), "--check"]);
    let v = stdout_json(&out);
    assert_eq!(v["rwd"], 2);
    assert_eq!(v["maxBond"], 4);

    let k4 = write(dir.path(), "k4.json", K4);
    let out = mbqc(dir.path(), &["ttn", k4.to_str().unwrap(), "--check"]);
    let v = stdout_json(&out);
    assert_eq!(v["rwd"], 1);
    assert_eq!(v["maxBond"], 2);
}
