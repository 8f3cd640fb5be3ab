// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! End-to-end checks of the command-line interface: exit codes, file
//! outputs, and determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_totalchroma"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("totalchroma-cli-{name}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

const C5: &str = "p 5 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 0 4\n";

#[test]
fn total_general_on_c5_exits_zero_within_budget() {
    let dir = tmpdir("c5");
    let graph = dir.join("c5.g");
    let coloring = dir.join("c5.json");
    let report = dir.join("c5-report.json");
    write(&graph, C5);
    let out = run(&[
        "total",
        graph.to_str().unwrap(),
        "--algorithm",
        "general",
        "--out",
        coloring.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(report["k"].as_u64().unwrap() <= 6);

    // The verifier accepts the emitted coloring and rejects a tight budget.
    let ok = run(&["verify", graph.to_str().unwrap(), coloring.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let tight = run(&[
        "verify",
        graph.to_str().unwrap(),
        coloring.to_str().unwrap(),
        "--budget",
        "3",
    ]);
    assert_eq!(tight.status.code(), Some(1));
}

#[test]
fn verify_rejects_tampered_coloring() {
    let dir = tmpdir("tamper");
    let graph = dir.join("c5.g");
    let coloring = dir.join("c5.json");
    write(&graph, C5);
    let out = run(&[
        "total",
        graph.to_str().unwrap(),
        "--out",
        coloring.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&coloring).unwrap()).unwrap();
    // Force the first two edge colors equal; C5's first two edges share a
    // vertex, so this breaks properness.
    let c = v["edge_colors"][0][2].clone();
    v["edge_colors"][1][2] = c;
    write(&coloring, &serde_json::to_string(&v).unwrap());
    let bad = run(&["verify", graph.to_str().unwrap(), coloring.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("invalid"));
}

#[test]
fn dense_on_non_regular_graph_exits_one() {
    let dir = tmpdir("nonreg");
    let graph = dir.join("path.g");
    write(&graph, "p 6 5\ne 0 1\ne 1 2\ne 2 3\ne 3 4\ne 4 5\n");
    let out = run(&["total", graph.to_str().unwrap(), "--algorithm", "dense"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not regular"));
}

#[test]
fn dense_strict_small_instance_exits_two_with_ledger() {
    let dir = tmpdir("strict");
    let graph = dir.join("g.g");
    let report = dir.join("fail.json");
    let gen = run(&["gen", "--n", "200", "--r", "140", "--seed", "1", "--out", graph.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let out = run(&[
        "total",
        graph.to_str().unwrap(),
        "--algorithm",
        "dense",
        "--eps",
        "0.3",
        "--mode",
        "strict",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let fail: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(fail["inequality"].as_str().unwrap().starts_with("margin."));
    assert!(!fail["report"]["checks"].as_array().unwrap().is_empty());
}

#[test]
fn gen_rejects_infeasible_parameters() {
    let dir = tmpdir("genbad");
    let out = run(&["gen", "--n", "5", "--r", "3", "--out", dir.join("x.g").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_writes_one_row_per_size_and_trial() {
    let dir = tmpdir("bench");
    let csv = dir.join("bench.csv");
    let out = run(&[
        "bench",
        "--sizes",
        "150,200",
        "--trials",
        "2",
        "--report",
        csv.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,r,trial,seed,success,k,ell,millis,failed_step,failed_inequality"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn identical_inputs_give_byte_identical_outputs() {
    let dir = tmpdir("determinism");
    let graph = dir.join("g.g");
    let gen = run(&["gen", "--n", "60", "--r", "40", "--seed", "9", "--out", graph.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0));
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for out in [&a, &b] {
        let r = run(&[
            "total",
            graph.to_str().unwrap(),
            "--seed",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
