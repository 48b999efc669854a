use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn charsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charsum")).args(args).output().expect("binary runs")
}

fn job(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn case<'a>(rep: &'a Value, key: &str) -> &'a Value {
    rep["cases"].as_array().unwrap().iter().find(|c| c["key"] == key).unwrap_or_else(|| panic!("no case {key}"))
}

#[test]
fn hd_product_job_passes() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(dir.path(), "hd.json", r#"{"kind": "hd", "p": 7, "s": 1, "n": 3, "lambda": "all"}"#);
    let out = charsum(&["--job", &f]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    assert_eq!(rep["summary"]["cases"], 6);
    assert_eq!(rep["summary"]["failed"], 0);
}

#[test]
fn monom_job_reports_solution() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(
        dir.path(),
        "monom.json",
        r#"{"kind": "monom", "p": 7, "exponents": [3, -1], "characters": ["trivial", {"eps": 3}], "a": 1}"#,
    );
    let out = charsum(&["--job", &f]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let sol = &case(&rep, "solution")["outputs"];
    assert_eq!(sol["b"], 6);
    assert_eq!(sol["c"]["coeffs"][0], "7");
    assert!(sol["c"]["coeffs"].as_array().unwrap()[1..].iter().all(|c| c == "0"));
    assert_eq!(case(&rep, "pointwise")["pass"], true);
}

#[test]
fn job_arrays_give_one_report_each() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(
        dir.path(),
        "many.json",
        r#"[{"kind": "gauss", "p": 5}, {"kind": "binom", "n": 3}, {"kind": "divisor", "moduli": [6], "trials": 20}]"#,
    );
    let out = charsum(&["--job", &f]);
    assert_eq!(out.status.code(), Some(0));
    let docs: Vec<Value> = serde_json::Deserializer::from_slice(&out.stdout).into_iter().map(Result::unwrap).collect();
    let kinds: Vec<&str> = docs.iter().map(|d| d["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["gauss", "binom", "divisor"]);
}

#[test]
fn identity_and_norm_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let zero = job(
        dir.path(),
        "zero.json",
        r#"{"kind": "identity", "p": 7, "monomial": [{"degree": 1, "index": 0, "n": 2}, {"degree": 1, "index": 0, "n": -1}, {"degree": 1, "index": 3, "n": -1}]}"#,
    );
    let out = charsum(&["--job", &zero]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let broken = job(
        dir.path(),
        "broken.json",
        r#"{"kind": "identity", "p": 7, "monomial": [{"degree": 1, "index": 0, "n": 3}, {"degree": 1, "index": 2, "n": -1}]}"#,
    );
    let rep = report(&charsum(&["--job", &broken]));
    assert!(case(&rep, "falsifier")["outputs"]["witness"].is_object());

    let norm = job(
        dir.path(),
        "norm.json",
        r#"{"kind": "norm", "p": 3, "factor_degrees": [2], "ranks": [1], "characters": ["trivial"], "a": 1}"#,
    );
    let out = charsum(&["--job", &norm]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn failing_case_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(dir.path(), "s.json", r#"{"kind": "suite", "name": "acceptance", "criteria": [7]}"#);
    let out = charsum(&["--job", &f]);
    assert_eq!(out.status.code(), Some(1));
    let last: Value = serde_json::from_str(String::from_utf8_lossy(&out.stdout).lines().last().unwrap()).unwrap();
    assert_eq!(last["failed"], serde_json::json!([7]));
}

#[test]
fn schema_violations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "{not json",
        r#"{"kind": "gauss"}"#,
        r#"{"kind": "teleport", "p": 5}"#,
        r#"{"kind": "gauss", "p": 5, "colour": "red"}"#,
        r#"{"kind": "gauss", "p": 6}"#,
        r#"{"kind": "suite", "name": "nightly"}"#,
    ] {
        let f = job(dir.path(), "bad.json", body);
        let out = charsum(&["--job", &f]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(out.stdout.is_empty(), "{body}");
    }
    assert_eq!(charsum(&["--job", "/nonexistent/job.json"]).status.code(), Some(2));
}

#[test]
fn size_bound_exits_three_and_names_the_job() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(
        dir.path(),
        "monom.json",
        r#"{"kind": "monom", "p": 7, "exponents": [3, -1], "characters": ["trivial", {"eps": 3}], "a": 1}"#,
    );
    let out = charsum(&["--job", &f, "--max-grid", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("naive transform"));

    let f = job(dir.path(), "full.json", r#"{"kind": "suite", "name": "full", "criteria": [16]}"#);
    let out = charsum(&["--job", &f, "--max-grid", "4"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("criterion 16"));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(
        dir.path(),
        "mixed.json",
        r#"[{"kind": "divisor", "moduli": [8, 12]}, {"kind": "monom", "p": 5, "exponents": [1, 1], "characters": ["trivial", {"eps": 2}], "a": 2, "depth": 2}]"#,
    );
    let a = charsum(&["--job", &f, "--seed", "11"]);
    let b = charsum(&["--job", &f, "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn floats_are_opt_in_and_advisory() {
    let dir = tempfile::tempdir().unwrap();
    let f = job(dir.path(), "g.json", r#"{"kind": "gauss", "p": 5, "lambda": [2]}"#);
    let plain = report(&charsum(&["--job", &f]));
    assert!(plain["cases"][0]["outputs"]["g"].get("advisory_float").is_none());
    let rep = report(&charsum(&["--job", &f, "--emit-floats"]));
    let approx = &rep["cases"][0]["outputs"]["g"]["advisory_float"];
    // ε_2 Gauss sum over F_5 is √5
    assert!((approx[0].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);
    assert!(approx[1].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn cache_dir_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    std::fs::create_dir(&cache).unwrap();
    let f = job(dir.path(), "g.json", r#"{"kind": "gauss", "p": 5}"#);
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_charsum"))
            .args(["--job", &f])
            .env("CHARSUM_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    let (first, second) = (run(), run());
    assert_eq!(first.status.code(), Some(0));
    assert!(std::fs::read_dir(&cache).unwrap().next().is_some(), "no table was persisted");
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn acceptance_suite_pattern_is_seed_independent() {
    let pattern = |seed: &str| {
        let out = charsum(&["--suite", "acceptance", "--seed", seed]);
        let lines: Vec<Value> =
            String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        let passes: Vec<(u64, bool)> =
            lines.iter().filter_map(|l| Some((l["criterion"].as_u64()?, l["pass"].as_bool()?))).collect();
        (out.status.code(), passes)
    };
    let (code_a, a) = pattern("1");
    let (code_b, b) = pattern("99");
    assert_eq!(a.len(), 15);
    assert_eq!(a, b);
    assert_eq!(code_a, code_b);
}

#[test]
fn golden_reports() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in ["monom_p7", "binom_n2"] {
        let job = dir.join(format!("{name}.job.json"));
        let out = charsum(&["--job", job.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        let want = std::fs::read_to_string(dir.join(format!("{name}.report.json"))).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), want, "{name}");
    }
}
