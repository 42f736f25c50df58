//! End-to-end tests of the `spdrange` binary: determinism of emitted files,
//! format validity, and documented exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spdrange"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spdrange-cli-{}-{tag}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn gen_is_byte_deterministic_and_valid() {
    let dir = tmp_dir("gen");
    let out1 = dir.join("a.json");
    let out2 = dir.join("b.json");
    for out in [&out1, &out2] {
        let st = run(&[
            "gen",
            "--seed",
            "42",
            "--dim",
            "2",
            "--n",
            "12",
            "--clusters",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success(), "stderr: {}", String::from_utf8_lossy(&st.stderr));
    }
    let b1 = fs::read(&out1).unwrap();
    let b2 = fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "same seed must produce byte-identical output");

    // Parsing revalidates every matrix (symmetry + positive definiteness).
    let data = spdrange::io::dataset_from_json(&String::from_utf8(b1).unwrap()).unwrap();
    assert_eq!(data.len(), 12);
    let labels = data.labels().unwrap();
    for l in 0..3 {
        assert_eq!(labels.iter().filter(|&&x| x == l).count(), 4);
    }
}

#[test]
fn experiment_csv_is_byte_deterministic() {
    let a = run(&[
        "experiment", "convergence", "--seed", "7", "--runs", "2", "--iters", "400", "--configs",
        "2x4",
    ]);
    let b = run(&[
        "experiment", "convergence", "--seed", "7", "--runs", "2", "--iters", "400", "--configs",
        "2x4",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("# convergence rates"));
    assert!(text.contains("seed=7"));
    assert_eq!(text.lines().count(), 2 + 2 + 1, "header, column names, 2 runs, 1 mean row");
}

#[test]
fn midrange_emits_valid_matrix_and_cost() {
    let dir = tmp_dir("midrange");
    let data_path = dir.join("data.json");
    run(&[
        "gen",
        "--seed",
        "3",
        "--dim",
        "2",
        "--n",
        "6",
        "--clusters",
        "2",
        "--out",
        data_path.to_str().unwrap(),
    ]);
    let out = bin()
        .args([
            "midrange",
            "--input",
            data_path.to_str().unwrap(),
            "--iters",
            "1000",
            "--cost",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let matrix = spdrange::io::matrix_from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(matrix.dim(), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("imr_cost "), "missing cost diagnostic: {stderr}");
}

#[test]
fn cluster_score_reports_accuracy() {
    let dir = tmp_dir("cluster");
    let data_path = dir.join("data.json");
    run(&[
        "gen",
        "--seed",
        "5",
        "--dim",
        "2",
        "--n",
        "20",
        "--clusters",
        "2",
        "--out",
        data_path.to_str().unwrap(),
    ]);
    let out = bin()
        .args([
            "cluster",
            "kmeanspp",
            "--input",
            data_path.to_str().unwrap(),
            "--k",
            "2",
            "--seed",
            "1",
            "--imr-iters",
            "100",
            "--score",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let model = spdrange::io::model_from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(model.k, 2);
    assert_eq!(model.assignment.len(), 20);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("points_identified,clusters_identified,clusters_lost"));
}

#[test]
fn cone_export_rows_stay_inside_cone() {
    let dir = tmp_dir("cone");
    let data_path = dir.join("data.json");
    run(&[
        "gen",
        "--seed",
        "9",
        "--dim",
        "2",
        "--n",
        "9",
        "--clusters",
        "3",
        "--out",
        data_path.to_str().unwrap(),
    ]);
    let out = bin()
        .args([
            "cone-export",
            "--input",
            data_path.to_str().unwrap(),
            "--iters",
            "200",
            "--with-roles",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut data_rows = 0;
    let mut iterate_rows = 0;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let (x, y, z): (f64, f64, f64) =
            (fields[3].parse().unwrap(), fields[4].parse().unwrap(), fields[5].parse().unwrap());
        assert!(z > (x * x + y * y).sqrt(), "row outside cone: {line}");
        match fields[0] {
            "data" => data_rows += 1,
            "iterate" => iterate_rows += 1,
            other => panic!("unexpected row kind {other}"),
        }
    }
    assert_eq!(data_rows, 9);
    assert_eq!(iterate_rows, 201);
}

#[test]
fn exit_codes_are_documented_behavior() {
    // Missing input file: validation error, exit 2.
    let out = run(&["midrange", "--input", "/nonexistent/data.json"]);
    assert_eq!(out.status.code(), Some(2));

    // Input that fails SPD validation: exit 2.
    let dir = tmp_dir("exit");
    let bad = dir.join("bad.json");
    fs::write(
        &bad,
        r#"{"points":[{"dim":2,"rows":[[1.0,2.0],[2.0,1.0]]}]}"#,
    )
    .unwrap();
    let out = run(&["midrange", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // Cone export of a d != 2 dataset: exit 2.
    let d3 = dir.join("d3.json");
    run(&["gen", "--seed", "1", "--dim", "3", "--n", "2", "--out", d3.to_str().unwrap()]);
    let out = run(&["cone-export", "--input", d3.to_str().unwrap(), "--iters", "0"]);
    assert_eq!(out.status.code(), Some(2));

    // Unsatisfiable center separation: numerical failure, exit 3.
    let out = run(&[
        "gen", "--seed", "1", "--dim", "2", "--n", "4", "--clusters", "2", "--min-sep", "60.0",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // Unknown flag: clap usage error, exit 2.
    let out = run(&["gen", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
}
