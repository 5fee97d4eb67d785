//! Golden fixtures. `BETAFLOW_BLESS=1 cargo test --test golden` rewrites them.

use std::fs;
use std::path::{Path, PathBuf};

use betaflow::golden::{bless, list_cases, verify_all, verify_golden, GoldenCase};
use betaflow::jobs::Job;
use betaflow::Error;

const Q5: &str = "poly:1,1,-2,-1,-1,1";
const Q4: &str = "poly:-1,-1,-1,0,1";
const QA: &str = "expr:1-b^2/(b+1)";
const G: &str = "poly:-1,-1,1";

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../golden")
}

/// (name, job, tolerance)
fn cases() -> Vec<(&'static str, serde_json::Value, Option<f64>)> {
    use serde_json::json;
    vec![
        ("quintic-kneading", json!({"command": "kneading", "beta": Q5, "alpha": "0"}), None),
        (
            "quintic-expand-one",
            json!({"command": "expand", "beta": Q5, "alpha": "0", "x": "1", "variant": "lower"}),
            None,
        ),
        ("quintic-not-sft", json!({"command": "sft", "beta": Q5, "alpha": "0", "emit": "json"}), None),
        ("quintic-solve-parry", json!({"command": "solve", "lower": "011(100)", "upper": "1(0)"}), None),
        ("quintic-counterexample-pair", json!({"command": "solve", "lower": "011(100)", "upper": "100(011)"}), None),
        ("quintic-membership", json!({"command": "conjugate", "beta": Q5, "alpha": "0", "xi": "00(011)"}), None),
        ("quintic-membership-zero", json!({"command": "conjugate", "beta": Q5, "alpha": "0", "xi": "(0)"}), None),
        ("quintic-approx-sft", json!({"command": "approx-sft", "beta": Q5, "alpha": "0", "n": 3}), None),
        ("quartic-kneading", json!({"command": "kneading", "beta": Q4, "alpha": QA}), None),
        ("quartic-expand-zero", json!({"command": "expand", "beta": Q4, "alpha": QA, "x": "0"}), None),
        ("quartic-solve", json!({"command": "solve", "lower": "0(10)", "upper": "1(0001)"}), None),
        ("quartic-sft", json!({"command": "sft", "beta": Q4, "alpha": QA, "emit": "json"}), Some(1e-9)),
        ("quartic-sft-csv", json!({"command": "sft", "beta": Q4, "alpha": QA, "emit": "csv"}), None),
        ("quartic-conjugate", json!({"command": "conjugate", "beta": Q4, "alpha": QA}), None),
        ("quartic-critical-hole", json!({"command": "bifurcation", "beta": Q4, "alpha": QA, "critical": true}), None),
        ("quartic-sweep", json!({"command": "sweep", "beta": Q4, "alpha": QA, "samples": 41}), Some(1e-9)),
        (
            "quartic-winning",
            json!({"command": "winning", "beta": Q4, "alpha": QA, "xi": "0", "gamma": "1/2", "depth": 8}),
            Some(1e-9),
        ),
        (
            "quartic-language",
            json!({"command": "oracle", "oracle": "language", "beta": Q4, "alpha": QA, "n": 14}),
            None,
        ),
        (
            "quartic-escape-beyond-critical",
            json!({"command": "oracle", "oracle": "escape", "beta": Q4, "alpha": QA, "t": "2/5", "samples": 10000, "steps": 1000, "seed": 1}),
            Some(1e-9),
        ),
        (
            "golden-expand-one",
            json!({"command": "expand", "beta": G, "alpha": "0", "x": "1", "variant": "lower"}),
            None,
        ),
        ("golden-solve-parry", json!({"command": "solve", "lower": "0(10)", "upper": "1(0)"}), None),
        ("golden-critical-hole", json!({"command": "bifurcation", "beta": G, "alpha": "0", "critical": true}), None),
        ("golden-e-plus", json!({"command": "bifurcation", "beta": G, "alpha": "0", "t": "expr:b^-2"}), None),
        ("golden-sweep", json!({"command": "sweep", "beta": G, "alpha": "0", "samples": 21}), Some(1e-9)),
        (
            "golden-escape",
            json!({"command": "oracle", "oracle": "escape", "beta": G, "alpha": "0", "t": "0.01", "samples": 100000, "steps": 1000, "seed": 2024}),
            Some(1e-9),
        ),
        (
            "golden-box-count",
            json!({"command": "oracle", "oracle": "box-count", "beta": G, "alpha": "0", "t": "0.1", "grid": 65536, "steps": 40}),
            Some(1e-9),
        ),
    ]
}

#[test]
fn fixtures_match() {
    let root = root();
    if std::env::var_os("BETAFLOW_BLESS").is_some() {
        for (name, job, tol) in cases() {
            let job: Job = serde_json::from_value(job).unwrap();
            bless(&root.join(name), &job, 64, tol).unwrap();
        }
    }
    let present: Vec<String> =
        list_cases(&root).unwrap().iter().map(|d| d.file_name().unwrap().to_string_lossy().into_owned()).collect();
    for (name, job, _) in cases() {
        assert!(present.iter().any(|p| p == name), "fixture {name} missing");
        let case = GoldenCase::load(&root.join(name)).unwrap();
        assert_eq!(case.job, serde_json::from_value::<Job>(job).unwrap(), "fixture {name} has a stale job");
    }
    let failures: Vec<String> = verify_all(&root)
        .unwrap()
        .into_iter()
        .filter(|o| !o.pass)
        .map(|o| format!("{}: {}", o.name, o.diffs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")))
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

fn scratch_copy(name: &str) -> PathBuf {
    let dst = std::env::temp_dir().join(format!("betaflow-golden-{}-{name}", std::process::id()));
    fs::create_dir_all(&dst).unwrap();
    for e in fs::read_dir(root().join(name)).unwrap().flatten() {
        fs::copy(e.path(), dst.join(e.file_name())).unwrap();
    }
    dst
}

#[test]
fn quintic_kneading_and_quartic_solve_pass() {
    for name in ["quintic-kneading", "quartic-solve"] {
        let case = GoldenCase::load(&root().join(name)).unwrap();
        assert!(verify_golden(&case).unwrap().pass, "{name}");
    }
    let k = fs::read_to_string(root().join("quintic-kneading/expected.txt")).unwrap();
    assert!(k.contains("tau_minus_one: 11(100)\n"), "{k}");
    let s = fs::read_to_string(root().join("quartic-solve/expected.txt")).unwrap();
    // x^4 - x^2 - x - 1 = (x + 1)(x^3 - x^2 - 1)
    assert!(s.contains("beta_minpoly: x^3 - x^2 - 1\n"), "{s}");
}

#[test]
fn corrupted_fixture_fails_with_field_diff() {
    let dir = scratch_copy("quartic-solve");
    let path = dir.join("expected.txt");
    let body = fs::read_to_string(&path).unwrap();
    fs::write(&path, body.replace("alpha_decimal: 0.128843244139", "alpha_decimal: 0.128843244140")).unwrap();
    let out = verify_golden(&GoldenCase::load(&dir).unwrap()).unwrap();
    assert!(!out.pass);
    assert!(out.diffs.iter().any(|d| d.field == "fixture digest"));
    let d = out.diffs.iter().find(|d| d.field.starts_with("alpha_decimal")).expect("field diff");
    assert_eq!((d.expected.as_str(), d.actual.as_str()), ("0.128843244140", "0.128843244139"));
    fs::remove_dir_all(dir).ok();

    // A toleranced case still rejects out-of-tolerance fields.
    let dir = scratch_copy("golden-sweep");
    let path = dir.join("expected.csv");
    let body = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = body.lines().map(String::from).collect();
    lines[1] = lines[1].replacen(",1.0", ",0.9", 1).replacen(",1,", ",0.9,", 1);
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    let out = verify_golden(&GoldenCase::load(&dir).unwrap()).unwrap();
    assert!(!out.pass);
    assert!(out.diffs.len() >= 2, "{:?}", out.diffs);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn missing_expected_file() {
    let dir = scratch_copy("quintic-kneading");
    fs::remove_file(dir.join("expected.txt")).unwrap();
    let err = verify_golden(&GoldenCase::load(&dir).unwrap()).unwrap_err();
    assert!(matches!(err, Error::MissingFixture(_)));
    assert_eq!(err.code(), "golden.MISSING-FIXTURE");
    fs::remove_dir_all(dir).ok();
}
