use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

const M2: &str = "n 2\n1: +2 -2\n2: -1 +1\n";
const M_DELTA: &str = "n 3\n1: +2 +3 -2 -3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2\n";
const M_BAD: &str = "n 3\n1: +2 -3 -2 +3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2\n";
const TORUS: &str =
    "n 4\n1: +2 -2 +3 -3 +4 -4\n2: +1 -1 +3 -3 +4 -4\n3: +1 -1 +2 -2 +4 -4\n4: +1 -1 +2 -2 +3 -3\n";

fn pscirc(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pscirc"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn witnesses(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| l.starts_with("witness: "))
        .map(str::to_string)
        .collect()
}

#[test]
fn sphere_both_agrees_on_delta() {
    let o = pscirc(&["sphere", "--both"], Some(M_DELTA));
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("# pscirc 1\n"));
    assert!(out.contains("agreement: yes"));
    assert!(witnesses(&o).is_empty());
}

#[test]
fn sphere_reports_a_witness_for_the_torus_fixture() {
    for mode in ["--direct", "--quads", "--both"] {
        let o = pscirc(&["sphere", mode], Some(TORUS));
        assert_eq!(code(&o), 1, "{mode}");
        assert!(!witnesses(&o).is_empty());
    }
    let o = pscirc(&["sphere", "--quads"], Some(TORUS));
    assert!(witnesses(&o).contains(&"witness: quad 1 2 3 4".to_string()));
}

#[test]
fn consistency_witness_names_the_triple() {
    let o = pscirc(&["consistency"], Some(M_BAD));
    assert_eq!(code(&o), 1);
    assert_eq!(
        witnesses(&o),
        ["witness: inconsistent k=1 j=2 i=3 entry=-3 side-k=in side-i=out"]
    );
    assert_eq!(code(&pscirc(&["consistency"], Some(M_DELTA))), 0);
}

#[test]
fn validation_failure_is_a_witness() {
    let o = pscirc(&["validate"], Some("n 2\n1: +2 +2\n2: -1 +1\n"));
    assert_eq!(code(&o), 1);
    let w = witnesses(&o);
    assert_eq!(w.len(), 1);
    assert!(w[0].starts_with("witness: invalid row=1 "), "{}", w[0]);
    assert!(w[0].contains("kind=duplicate-entry"), "{}", w[0]);
    assert_eq!(code(&pscirc(&["validate"], Some(M2))), 0);
}

#[test]
fn usage_and_input_errors_exit_two() {
    let o = pscirc(&["validate", "--bogus"], Some(M2));
    assert_eq!(code(&o), 2);
    let o = pscirc(&["genus"], Some("n 2\n1: +2 -x\n"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    let o = pscirc(&["genus", "/nonexistent/input.psm"], None);
    assert_eq!(code(&o), 2);
    let o = pscirc(&["enumerate", "--n", "5", "--filter", "om"], None);
    assert_eq!(code(&o), 2);
    let o = pscirc(&["iso", "--quads"], Some(&format!("{M_DELTA}\n{M_DELTA}")));
    assert_eq!(code(&o), 2);
}

#[test]
fn iso_from_files_and_blocks() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.psm", M_DELTA);
    let b = file(&dir, "b.psm", M_BAD);
    let relabelled = pscirc(&["relabel", "1:2,2:3,3:1"], Some(M_DELTA));
    assert_eq!(code(&relabelled), 0);
    let c = file(&dir, "c.psm", &stdout(&relabelled));
    let run =
        |x: &PathBuf, y: &PathBuf| pscirc(&["iso", x.to_str().unwrap(), y.to_str().unwrap()], None);
    assert_eq!(code(&run(&a, &c)), 0);
    let o = run(&a, &b);
    assert_eq!(code(&o), 1);
    assert!(witnesses(&o)[0].starts_with("witness: not-isomorphic "));
    let blocks = format!(
        "{TORUS}\n{}",
        stdout(&pscirc(&["relabel", "1:4,4:1"], Some(TORUS)))
    );
    assert_eq!(code(&pscirc(&["iso", "--both"], Some(&blocks))), 0);
}

#[test]
fn genus_and_faces() {
    let o = pscirc(&["genus"], Some(M_DELTA));
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for line in ["vertices 6", "edges 12", "faces 8", "genus 0"] {
        assert!(out.lines().any(|l| l == line), "{line}");
    }
    let o = pscirc(&["genus"], Some(TORUS));
    assert!(stdout(&o).lines().any(|l| l == "genus 1"));
    let o = pscirc(&["faces"], Some(M2));
    assert_eq!(code(&o), 0);
}

#[test]
fn enumerate_three_curve_spherical_classes() {
    let o = pscirc(&["enumerate", "--n", "3", "--filter", "genus0"], None);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("n 3")).count(), 5);
    let again = pscirc(&["enumerate", "--n", "3", "--filter", "genus0"], None);
    assert_eq!(stdout(&again), out);
    let s = pscirc(
        &[
            "enumerate",
            "--n",
            "4",
            "--filter",
            "consistent",
            "--summary",
        ],
        None,
    );
    assert_eq!(code(&s), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&s)).unwrap();
    assert_eq!(json["format"], "pscirc-census/1");
    assert_eq!(json["classes"], 110);
    assert_eq!(json["genus0"], 72);
}

#[test]
fn shard_count_does_not_change_output() {
    let run = |shards: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_pscirc"))
            .args(["enumerate", "--n", "4", "--filter", "genus0"])
            .env("PSCIRC_SHARDS", shards)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        o.stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn matrix_operations() {
    let o = pscirc(&["reorient", "2"], Some(M2));
    assert_eq!(code(&o), 0);
    let o = pscirc(&["submatrix", "--drop", "3"], Some(M_DELTA));
    assert_eq!(code(&o), 0);
    let back = pscirc(&["iso"], Some(&format!("{}\n{M2}", stdout(&o))));
    assert_eq!(code(&back), 0);
    let c = pscirc(&["canonical"], Some(M_DELTA));
    assert!(stdout(&c).contains("# labelling "));
    assert_eq!(code(&pscirc(&["reorient", "9"], Some(M2))), 2);
}

#[test]
fn classification_and_om() {
    let o = pscirc(&["classify3"], Some(M_DELTA));
    assert_eq!(stdout(&o).lines().last(), Some("delta"));
    assert_eq!(code(&pscirc(&["om"], Some(M_DELTA))), 0);
    assert_eq!(code(&pscirc(&["om"], Some(M_BAD))), 1);
    let q = pscirc(&["quads"], Some(TORUS));
    assert_eq!(code(&q), 0);
}

#[test]
fn circles_and_exports() {
    let o = pscirc(&["from-circles"], Some("1: 0 0 1\n2: 1 0 1\n"));
    assert_eq!(code(&o), 0);
    let iso = pscirc(&["iso"], Some(&format!("{}\n{M2}", stdout(&o))));
    assert_eq!(code(&iso), 0);
    let bad = pscirc(&["from-circles"], Some("1: 0 0 1\n2: 5 0 1\n"));
    assert_eq!(code(&bad), 2);
    let j = pscirc(&["export", "--json"], Some(M_DELTA));
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["format"], "pscirc-graph/1");
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
    let d = pscirc(&["export", "--dot"], Some(M_DELTA));
    assert!(stdout(&d).contains("genus=0"));
}
