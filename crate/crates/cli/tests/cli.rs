use std::path::PathBuf;
use std::process::{Command, Output};

const Q4: &str = "poly:-1,-1,-1,0,1";
const QA: &str = "expr:1-b^2/(b+1)";

fn betaflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betaflow")).args(args).env_remove("BETAFLOW_PRECISION").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("betaflow-cli-{}-{name}", std::process::id()))
}

#[test]
fn solve_quartic_pair() {
    let o = betaflow(&["solve", "--lower", "0(10)", "--upper", "1(0001)"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("beta_minpoly: x^3 - x^2 - 1\n"), "{s}");
    assert!(s.contains("beta: 1.465571231877\n"), "{s}");
    assert!(s.contains("alpha_decimal: 0.128843244139\n"), "{s}");
}

#[test]
fn delta_violation_is_a_usage_error() {
    let o = betaflow(&["expand", "--beta", "1.5", "--alpha", "0.7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error[itinerary.INVALID-PARAMS]"), "{}", stderr(&o));
}

#[test]
fn domain_error_exits_one() {
    let o = betaflow(&["sft", "--beta", "poly:1,1,-2,-1,-1,1", "--alpha", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[sft.NOT-SFT]"), "{}", stderr(&o));
    let o = betaflow(&["solve", "--lower", "011(100)", "--upper", "100(011)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("INVALID(COND4)"), "{}", stderr(&o));
}

#[test]
fn bad_input_is_a_usage_error() {
    assert_eq!(betaflow(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(betaflow(&["kneading", "--beta", "poly:x", "--alpha", "0"]).status.code(), Some(2));
    assert_eq!(betaflow(&["winning", "--beta", Q4, "--alpha", QA, "--gamma", "3/2"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_betaflow"))
        .args(["kneading", "--beta", Q4, "--alpha", QA])
        .env("BETAFLOW_PRECISION", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn expand_and_kneading() {
    let o = betaflow(&["expand", "--beta", Q4, "--alpha", QA, "--x", "0"]);
    assert_eq!(stdout(&o), "(0001)\n");
    let o = betaflow(&["expand", "--beta", "poly:1,1,-2,-1,-1,1", "--alpha", "0", "--x", "1", "--variant", "lower"]);
    assert_eq!(stdout(&o), "11(100)\n");
    let o = betaflow(&["kneading", "--beta", Q4, "--alpha", QA]);
    assert!(stdout(&o).contains("tau_minus_one: (10)\ntau_plus_zero: (0001)\n"), "{}", stdout(&o));
}

#[test]
fn sft_formats() {
    let dot = stdout(&betaflow(&["sft", "--beta", Q4, "--alpha", QA, "--emit", "dot"]));
    assert!(dot.starts_with("digraph"), "{dot}");
    let csv = stdout(&betaflow(&["sft", "--beta", Q4, "--alpha", QA, "--emit", "csv"]));
    assert_eq!(csv.lines().next(), Some("cell,0,1,2,3"));
    let json = stdout(&betaflow(&["sft", "--beta", Q4, "--alpha", QA]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["perron_root_is_beta"], serde_json::Value::Bool(true));
}

#[test]
fn sweep_writes_csv_and_plot_script_deterministically() {
    let (csv, py) = (scratch("sweep.csv"), scratch("plot.py"));
    let args = ["sweep", "--beta", "poly:-1,-1,1", "--alpha", "0", "--samples", "11", "--out"];
    let run = |extra: &[&str]| {
        let mut a: Vec<&str> = args.to_vec();
        a.push(csv.to_str().unwrap());
        a.extend_from_slice(extra);
        let o = betaflow(&a);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read_to_string(&csv).unwrap()
    };
    let first = run(&["--plot-script", py.to_str().unwrap()]);
    assert_eq!(first, run(&[]));
    assert!(first.starts_with("t,eta_kneading,eta_counting,beta2_minpoly,alpha2,plateau\n"));
    assert_eq!(first.lines().count(), 12);
    let script = std::fs::read_to_string(&py).unwrap();
    assert!(script.contains(csv.to_str().unwrap()));
    std::fs::remove_file(csv).ok();
    std::fs::remove_file(py).ok();
}

#[test]
fn oracles_and_bifurcation() {
    let o = betaflow(&["oracle", "language", "--beta", "poly:-1,-1,1", "--alpha", "0", "--n", "5"]);
    assert_eq!(stdout(&o), "n,count\n1,2\n2,3\n3,5\n4,8\n5,13\n");
    let o = betaflow(&[
        "oracle",
        "escape",
        "--beta",
        "poly:-1,-1,1",
        "--alpha",
        "0",
        "--t",
        "0.5",
        "--samples",
        "1000",
        "--steps",
        "50",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["escape_fraction"], serde_json::json!(1.0));
    let o = betaflow(&["bifurcation", "--beta", "poly:-1,-1,1", "--alpha", "0", "--critical"]);
    assert!(stdout(&o).contains("critical_hole_decimal: 0.381966011250\n"), "{}", stdout(&o));
}

#[test]
fn approx_sft_and_winning() {
    let o = betaflow(&["approx-sft", "--beta", "poly:1,1,-2,-1,-1,1", "--alpha", "0", "--n", "2"]);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 3, "{s}");
    assert!(s.lines().skip(1).all(|l| l.contains(",true,")), "{s}");
    let o = betaflow(&["winning", "--beta", Q4, "--alpha", QA, "--depth", "5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["certified"], serde_json::Value::Bool(true));
}
