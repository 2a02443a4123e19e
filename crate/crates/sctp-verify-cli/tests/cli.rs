// Copyright 2026 The sctp-verify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sctp-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn baseline_passes_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-baseline", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&run(&["verify-baseline", "--model", "telepath"])), 2);
    assert_eq!(code(&run(&["verify-baseline", "--property", "phi42"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["render-trace", "/nonexistent/trace.json"])), 2);
}

#[test]
fn config_file_is_read_and_unknown_fields_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"colour": "blue"}"#).unwrap();
    assert_eq!(code(&run(&["verify-baseline", "--config", path(&bad)])), 2);
    let tiny = dir.path().join("tiny.json");
    std::fs::write(&tiny, r#"{"state_cap": 10}"#).unwrap();
    assert_eq!(code(&run(&["explore", "--config", path(&tiny)])), 3);
}

#[test]
fn ambiguity_trace_renders_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["ambiguity-demo", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let trace = dir.path().join("traces").join("ambiguity.json");
    let chart = std::fs::read_to_string(dir.path().join("charts").join("ambiguity.txt")).unwrap();
    let rendered = run(&["render-trace", path(&trace)]);
    assert_eq!(code(&rendered), 0);
    assert_eq!(stdout(&rendered), chart);

    let broken = dir.path().join("broken.json");
    let mut json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    json["actions"].as_array_mut().unwrap().swap(0, 1);
    std::fs::write(&broken, json.to_string()).unwrap();
    let out = run(&["render-trace", path(&broken)]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("note:"));
}

#[test]
fn off_path_matrix_agrees_with_the_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "matrix",
        "--model",
        "off-path",
        "--property",
        "phi9",
        "--max-attacks",
        "1",
        "--check-against-paper",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(dir.path().join("summary.txt").exists());
    let charts: Vec<_> = std::fs::read_dir(dir.path().join("charts"))
        .unwrap()
        .collect();
    assert_eq!(charts.len(), 1);
}
