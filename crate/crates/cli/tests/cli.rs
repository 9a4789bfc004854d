use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn cuspcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspcount")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(out)).unwrap()
}

#[test]
fn count_json_reports_total_and_contributions() {
    let v = json(&cuspcount(&["count", "--polygon", "triangle:3", "--genus", "0"]));
    assert_eq!(v["total"], "24");
    assert_eq!(v["mode"], "cuspidal");
    assert_eq!(v["n"], 7);
    let contribs = v["contributions"].as_array().unwrap();
    assert_eq!(contribs.len(), 6);
    for c in contribs {
        assert!(c["multiplicity"].as_str().unwrap().contains('/'));
        assert!(!c["marking"].is_null());
    }
}

#[test]
fn total_only_drops_contributions() {
    let v = json(&cuspcount(&["count", "--polygon", "triangle:4", "--genus", "0", "--mode", "severi", "--total-only"]));
    assert_eq!(v["total"], "620");
    assert!(v["contributions"].as_array().unwrap().is_empty());
}

#[test]
fn csv_and_table_formats() {
    let out = cuspcount(&["count", "--polygon", "triangle:3", "--genus", "0", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("index,path,tiles"));
    assert_eq!(lines.count(), 6);

    let out = cuspcount(&["count", "--polygon", "triangle:3", "--genus", "0", "--format", "table"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("24"));
}

#[test]
fn svg_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("drawings");
    let out = cuspcount(&[
        "count",
        "--polygon",
        "triangle:3",
        "--genus",
        "0",
        "--total-only",
        "--emit-svg",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let mut names: Vec<String> =
        fs::read_dir(&target).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.len(), 6);
    assert_eq!(names[0], "contribution-0000.svg");
    let svg = fs::read_to_string(target.join(&names[0])).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("special"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| cuspcount(args).status.code().unwrap();
    assert_eq!(code(&["count", "--polygon", "triangle:3", "--genus", "1"]), 2);
    assert_eq!(code(&["count", "--polygon", "hexagon:3", "--genus", "0"]), 2);
    assert_eq!(code(&["count", "--polygon", "triangle:4", "--genus", "0", "--max-paths", "5"]), 3);
    assert_eq!(code(&["count", "--polygon", "triangle:4", "--genus", "0", "--max-subdivisions", "2"]), 3);
    assert_eq!(code(&["count", "--polygon", "triangle:3", "--genus", "0", "--perturb-total", "1/3"]), 4);
    assert_eq!(code(&["decompose", "--d", "2"]), 2);
}

#[test]
fn factor_calculators() {
    let v = json(&cuspcount(&["factors", "theta", "--max", "3"]));
    let thetas: Vec<u64> = v.as_array().unwrap().iter().map(|r| r["theta"].as_u64().unwrap()).collect();
    assert_eq!(thetas, [0, 0, 2]);
    assert_eq!(json(&cuspcount(&["factors", "quad", "--a", "2,2", "--b", "2,3"])), 2);
    assert_eq!(json(&cuspcount(&["factors", "flat-vertex", "--m1", "1", "--m2", "2", "--case", "upper"])), "5/6");
    assert_eq!(json(&cuspcount(&["factors", "elliptic-edge", "--m", "3"])), "2/3");
    assert_eq!(cuspcount(&["factors", "quad", "--a", "1,0", "--b", "2,0"]).status.code(), Some(2));
}

#[test]
fn decompose_and_oracle() {
    let v = json(&cuspcount(&["decompose", "--d", "4"]));
    assert_eq!(v["total"], "72");
    let rows = v["rows"].as_array().unwrap();
    let b = rows.iter().find(|r| r["family"] == "b").unwrap();
    assert_eq!(b["subtotal"], "21");

    let out = cuspcount(&["oracle", "--d", "4"]);
    assert_eq!(stdout(&out).trim(), "620");
}
