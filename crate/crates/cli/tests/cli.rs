use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn dstit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dstit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn verdict() -> String {
    fixture("verdict.model").display().to_string()
}

/// Exact fraction `n/d` as a pair, reduced.
fn frac(text: &str) -> (i64, i64) {
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse().unwrap(), d.trim().parse().unwrap()),
        None => (text.trim().parse().unwrap(), 1),
    };
    reduce(n, d)
}

fn reduce(n: i64, d: i64) -> (i64, i64) {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = gcd(n, d).max(1);
    let s = if d < 0 { -1 } else { 1 };
    (s * n / g, s * d / g)
}

#[test]
fn deontic_report_for_the_doctor() {
    let o = dstit(&["deontic", &verdict(), "-a", "doctor", "-m", "m2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("optimal   = {{h1}}"), "{text}");
    assert!(text.contains("s-optimal = {{h1}, {h2}}"), "{text}");
    assert!(text.contains("eu        = {{h1}: 4/5, {h2}: 0}"), "{text}");

    let o = dstit(&["deontic", &verdict(), "-a", "doctor", "-m", "m3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["optimal"], serde_json::json!([["h4"]]));
    assert_eq!(v["eu"][0]["eu"], "4/5");
}

#[test]
fn eval_reports_truth_through_the_exit_code() {
    let o = dstit(&["eval", &verdict(), "-i", "m2/h1", "-f", "Ob:doctor a & K:doctor Ob:doctor a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "true");

    let o = dstit(&["eval", &verdict(), "-i", "m2/h1", "-f", "K:doctor e"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn explained_expected_utilities_add_up() {
    let oracle: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("oracle/verdict.eu.json")).unwrap()).unwrap();
    for (index, moment) in [("m2/h1", "m2"), ("m3/h3", "m3")] {
        let o = dstit(&["eval", &verdict(), "-i", index, "-f", "Ob:doctor a", "--explain"]);
        let text = stdout(&o);
        let mut seen = 0;
        for line in text.lines().map(str::trim).filter(|l| l.starts_with("eu {")) {
            // eu {h1} = 9/10 * 1 [m2/h1] + 1/10 * -1 [m3/h3] = 4/5
            let (cell, rest) = line["eu ".len()..].split_once(" = ").unwrap();
            let (terms, total) = rest.rsplit_once(" = ").unwrap();
            let mut sum = (0i64, 1i64);
            for term in terms.split(" + ") {
                let term = term.split(" [").next().unwrap();
                let (w, v) = term.split_once(" * ").unwrap();
                let (w, v) = (frac(w), frac(v));
                sum = reduce(sum.0 * w.1 * v.1 + w.0 * v.0 * sum.1, sum.1 * w.1 * v.1);
            }
            assert_eq!(sum, frac(total), "{line}");
            let expected = oracle["doctor"][moment][cell].as_str().unwrap();
            assert_eq!(frac(total), frac(expected), "{line}");
            seen += 1;
        }
        assert_eq!(seen, 2, "{text}");
    }
}

#[test]
fn check_passes_good_models_and_fails_broken_ones() {
    let o = dstit(&["check", &fixture("minimal.model").display().to_string()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("measure solo: pass (exhaustive"));

    let o = dstit(&["check", &fixture("broken/nc-doctor.model").display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NC        FAIL"), "{}", stdout(&o));
}

#[test]
fn errors_and_usage_have_distinct_exit_codes() {
    let o = dstit(&["eval", &verdict(), "-i", "m2/h1", "-f", "a &"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot parse formula"));

    let o = dstit(&["eval", &verdict(), "-i", "m9/h1", "-f", "a"]);
    assert_eq!(o.status.code(), Some(3));

    let o = dstit(&["eval", &verdict()]);
    assert_eq!(o.status.code(), Some(2));
    let o = dstit(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn truthset_and_valid() {
    let o = dstit(&["truthset", &verdict(), "-f", "a"]);
    assert_eq!(stdout(&o).lines().collect::<Vec<_>>(), ["m2/h1", "m3/h3"]);

    let o = dstit(&["valid", &verdict(), "-f", "[] a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("counterexample at "));

    let o = dstit(&["valid", &verdict(), "-f", "K:doctor a -> a"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "valid");
}

#[test]
fn search_writes_a_countermodel_that_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cm.model");
    let o = dstit(&[
        "search",
        "-f",
        "Ob:doctor a -> O:doctor a",
        "--budget",
        "0",
        "--pool",
        &verdict(),
        "-o",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let at = stdout(&o).trim().rsplit(' ').next().unwrap().to_string();
    let o = dstit(&["eval", &out.display().to_string(), "-i", &at, "-f", "Ob:doctor a -> O:doctor a"]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn search_gives_up_on_tautologies() {
    let o = dstit(&["search", "-f", "p | !p", "--budget", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "exhausted after 20 generated models");
}

#[test]
fn axioms_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.json");
    let o = dstit(&[
        "axioms",
        &verdict(),
        "--generate",
        "5",
        "--seed",
        "3",
        "--instantiations",
        "2",
        "--json",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(v.is_object(), "{v}");

    let o = dstit(&["axioms"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn explain_trace_passes_the_recompute_script() {
    use std::io::Write;
    use std::process::Stdio;
    let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/check_explain.py");
    let oracle = fixture("oracle/verdict-variation.eu.json");
    let model = fixture("verdict-variation.model").display().to_string();
    for (index, moment) in [("m2/h1", "m2"), ("m3/h4", "m3")] {
        let trace = dstit(&["eval", &model, "-i", index, "-f", "Ob:doctor !a", "--explain"]);
        let mut child = Command::new("python3")
            .arg(&script)
            .arg(&oracle)
            .args(["doctor", moment])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .expect("python3 on PATH");
        child.stdin.take().unwrap().write_all(&trace.stdout).unwrap();
        let out = child.wait_with_output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
        assert!(stdout(&out).starts_with("2 lines checked"));
    }
}
