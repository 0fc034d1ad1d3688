use std::path::{Path, PathBuf};

use prefcalc::cli::run_with_seed;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    run_seeded(args, Some("7"))
}

fn run_seeded(args: &[&str], seed: Option<&str>) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("prefcalc").chain(args.iter().copied());
    let code = run_with_seed(argv, seed, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const PRODUCT: &str = r#"{
  "attributes": [
    {"name": "x", "levels": [0, 1, 2, 3, 4, 5], "curve": {"family": "linear"}},
    {"name": "y", "levels": [0, 1, 2, 3, 4], "curve": {"family": "linear"}}
  ],
  "joint": {"type": "product"}
}"#;

// Utility is zero everywhere with x <= 3.
const FLAT_TABLE: &str = r#"{
  "attributes": [
    {"name": "x", "levels": [0, 3, 5]},
    {"name": "y", "levels": [0, 2, 4]}
  ],
  "joint": {"type": "table", "values": [0, 0, 0, 0, 0, 0, 0, 0.5, 1]}
}"#;

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn parse_prints_canonical_form() {
    let r = run(&["parse", "~(x=2 | y=3)"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out.trim(), "~x=2 . ~y=3");
}

#[test]
fn parse_error_exits_2() {
    let r = run(&["parse", "x=2=3"]);
    assert_eq!(r.code, 2);
    assert!(r.out.is_empty());
    assert!(r.err.contains("duplicate"), "{}", r.err);
}

#[test]
fn eval_disjunction_of_independent_attributes() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", PRODUCT);
    let r = run(&["eval", "--model", p(&m), "--expr", "x=3 | y=2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    // 0.6 + 0.5 - 0.6 * 0.5
    let u: f64 = r.out.trim().parse().unwrap();
    assert!((u - 0.8).abs() < 1e-12);
    let positional = run(&["eval", "--model", p(&m), "x=3 | y=2"]);
    assert_eq!(positional.out, r.out);
}

#[test]
fn conditional_on_zero_utility_exits_1() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", FLAT_TABLE);
    let r = run(&["cond", "--model", p(&m), "--given", "x=3", "y=2"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("undefined"), "{}", r.err);
    let ok = run(&["cond", "--model", p(&m), "--given", "x=5", "y=2"]);
    assert_eq!(ok.code, 0, "{}", ok.err);
    assert_eq!(ok.out.trim(), "0.5");
}

#[test]
fn invalid_and_missing_models() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        &FLAT_TABLE.replace("[0, 0, 0, 0, 0, 0", "[0.1, 0, 0, 0, 0, 0"),
    );
    let r = run(&["eval", "--model", p(&bad), "x=3"]);
    assert_eq!(r.code, 1);
    assert!(!r.err.is_empty());
    let unsorted = write(
        &dir,
        "u.json",
        &PRODUCT.replace("[0, 1, 2, 3, 4, 5]", "[0, 2, 1, 3, 4, 5]"),
    );
    assert_eq!(run(&["eval", "--model", p(&unsorted), "x=3"]).code, 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["eval", "--model", p(&missing), "x=3"]).code, 2);
    assert_eq!(
        run(&["eval", "--model", p(&write(&dir, "m.json", PRODUCT)), "w=1"]).code,
        2
    );
}

#[test]
fn identities_pass() {
    let r = run(&[
        "identities",
        "--attrs",
        "2",
        "--levels",
        "5",
        "--trials",
        "200",
    ]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert_eq!(r.out.lines().filter(|l| l.starts_with("PASS")).count(), 18);
}

#[test]
fn verify_is_deterministic_under_a_seed() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", PRODUCT);
    let a = run(&["verify", "--model", p(&m), "--trials", "100"]);
    assert_eq!(a.code, 0, "{}", a.out);
    let b = run(&["verify", "--model", p(&m), "--trials", "100"]);
    assert_eq!(a.out, b.out);
    assert_eq!(
        run_seeded(&["verify", "--model", p(&m)], Some("abc")).code,
        2
    );
}

#[test]
fn grid_export() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", FLAT_TABLE);
    let out = dir.path().join("grid.csv");
    let r = run(&["grid", "--model", p(&m), "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "x,y,utility");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[8], "5,2,0.5");
    assert!(!csv.contains('\r'));
}

#[test]
fn axioms_meet_expectations() {
    let r = run(&["axioms", "--trials", "2000"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("(0, 0, 1)"), "{}", r.out);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&[]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["eval", "x=1"]).code, 2);
    let help = run(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.out.contains("identities"));
}
