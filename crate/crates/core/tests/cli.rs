use std::fs;
use std::path::Path;
use std::process::Command;

use omd::cli::{run_from, EXIT_BUDGET, EXIT_NONEXISTENT, EXIT_OK, EXIT_PARSE, EXIT_VERIFY_FAIL};
use serde_json::Value;

struct Run {
    code: u8,
    stdout: String,
    stderr: String,
}

fn omd(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_from(std::iter::once("omd").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_twelve_two() {
    let r = omd(&["generate", "--n", "12", "--k", "2"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["side"], 11);
    assert_eq!(v["meta"]["construction"]["path"], "seeded6k");
    assert_eq!(v["meta"]["report"]["passed"], true);
    assert_eq!(v["meta"]["rng"], "chacha8");
    assert!(r.stderr.contains("n = 6k"), "{}", r.stderr);
}

#[test]
fn generate_refuses_nonexistent_parameters() {
    let r = omd(&["generate", "--n", "6", "--k", "1"]);
    assert_eq!(r.code, EXIT_NONEXISTENT);
    assert!(r.stderr.contains("side 3 and 5"), "{}", r.stderr);
    assert!(r.stdout.is_empty());

    let r = omd(&["generate", "--n", "10", "--k", "2"]);
    assert_eq!(r.code, EXIT_NONEXISTENT);
    assert!(r.stderr.contains("not a multiple of 2k = 4"), "{}", r.stderr);
}

#[test]
fn budget_exhaustion_has_its_own_exit_code() {
    // side 9 has no strong starter, so the cell search must run
    let r = omd(&["generate", "--n", "10", "--k", "1", "--budget", "5"]);
    assert_eq!(r.code, EXIT_BUDGET, "{}", r.stderr);
}

#[test]
fn generated_files_verify_and_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let r = omd(&["generate", "--n", "16", "--k", "2", "--seed", "3", "--out", path_str(p)]);
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let r = omd(&["verify", path_str(&a)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    assert!(r.stdout.contains("PASS"));

    let r = omd(&["transversal", path_str(&a)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let cells: Vec<(usize, usize)> = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(cells.len(), 15);
}

#[test]
fn verify_names_the_missing_pair() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.json");
    assert_eq!(omd(&["generate", "--n", "16", "--k", "2", "--out", path_str(&p)]).code, EXIT_OK);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    let edges = v["cells"][0]["edges"].as_array_mut().unwrap();
    let removed = edges.pop().unwrap();
    fs::write(&p, v.to_string()).unwrap();

    let r = omd(&["verify", path_str(&p)]);
    assert_eq!(r.code, EXIT_VERIFY_FAIL);
    let pair = format!("{}-{}", removed[0], removed[1]);
    assert!(r.stdout.contains(&pair), "expected {pair} in\n{}", r.stdout);
}

#[test]
fn verify_rejects_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\"n\": 4, \"cells\": [").unwrap();
    assert_eq!(omd(&["verify", path_str(&p)]).code, EXIT_PARSE);
    assert_eq!(omd(&["verify", path_str(&dir.path().join("missing.json"))]).code, EXIT_PARSE);
    assert_eq!(omd(&["transversal", path_str(&p)]).code, EXIT_PARSE);
}

#[test]
fn grid_and_latex_formats() {
    let r = omd(&["generate", "--n", "8", "--k", "1", "--format", "grid"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.stdout.lines().count(), 7);
    assert!(r.stdout.lines().all(|l| l.split('|').count() == 7));

    let r = omd(&["generate", "--n", "8", "--k", "2", "--format", "latex"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.contains("\\begin{array}"));

    let r = omd(&["generate", "--n", "20", "--k", "2", "--format", "latex"]);
    assert_ne!(r.code, EXIT_OK);
    assert!(r.stderr.contains("side <= 15"), "{}", r.stderr);
}

#[test]
fn sweep_tables() {
    let r = omd(&["sweep", "--n-max", "2", "--k-max", "1"]);
    assert_eq!(r.code, EXIT_OK);
    let rows: Vec<&str> = r.stdout.lines().skip(1).filter(|l| !l.contains("cases")).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].split_whitespace().take(2).eq(["2", "1"]));
    assert!(rows[0].contains("yes"));

    let r = omd(&["sweep", "--n-max", "24", "--k-max", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    for line in r.stdout.lines().skip(1).filter(|l| !l.contains("cases")) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let expect = if f[1] == "1" && (f[0] == "4" || f[0] == "6") { "nonexistent" } else { "yes" };
        assert_eq!(f[4], expect, "{line}");
    }
    assert!(r.stdout.contains("0 failed"));
}

#[test]
fn sweep_order_is_fixed() {
    let a = omd(&["sweep", "--n-max", "36", "--k-max", "3"]);
    let b = omd(&["sweep", "--n-max", "36", "--k-max", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let keys: Vec<(usize, usize)> = a
        .stdout
        .lines()
        .skip(1)
        .filter(|l| !l.contains("cases"))
        .map(|l| {
            let f: Vec<usize> = l.split_whitespace().take(2).map(|x| x.parse().unwrap()).collect();
            (f[1], f[0])
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_omd");
    let ok = Command::new(bin).args(["generate", "--n", "8", "--k", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stderr).contains("n = 4k"));
    let none = Command::new(bin).args(["generate", "--n", "4", "--k", "1"]).output().unwrap();
    assert_eq!(none.status.code(), Some(2));
    let again = Command::new(bin).args(["generate", "--n", "8", "--k", "2"]).output().unwrap();
    assert_eq!(ok.stdout, again.stdout);
}
