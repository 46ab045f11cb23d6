use std::process::{Command, Output};

use ellsigma::classes::f_eval;
use ellsigma::{lift, CurveParams, CurvePoint, Jet, JetShape, ThetaFunction};
use num_complex::Complex64;

fn ellsigma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellsigma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// The `re,im` value printed after `label:`.
fn value(o: &Output, label: &str) -> Complex64 {
    let text = stdout(o);
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{label}: ")))
        .unwrap_or_else(|| panic!("no `{label}` line in {text}"));
    let (re, im) = line.split_once(',').unwrap();
    Complex64::new(re.parse().unwrap(), im.parse().unwrap())
}

fn report(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sigma_vanishes_at_zero() {
    let o = ellsigma(&["eval", "sigma", "--z", "0", "--tau", "i"]);
    assert!(o.status.success());
    assert_eq!(value(&o, "sigma"), Complex64::new(0.0, 0.0));
    assert!(stdout(&o).contains("q-product factors"));
}

#[test]
fn weil_of_half_periods() {
    let o = ellsigma(&["eval", "weil", "--a", "1/2,0"]);
    assert!(o.status.success());
    assert!((value(&o, "weil") + 1.0).norm() < 1e-12);
    let o = ellsigma(&["eval", "weil", "--a", "0,1/2", "--shift-t", "-1"]);
    assert!((value(&o, "weil") - 1.0).norm() < 1e-12);
}

#[test]
fn f_matches_the_library() {
    let o = ellsigma(&[
        "eval",
        "F",
        "--theta",
        "sigma_d(2)",
        "--m",
        "1,1",
        "--a",
        "0,1/2",
        "--z",
        "0.1",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = CurveParams::square();
    let shape = JetShape::new(0, 0);
    let z = Complex64::new(0.1, 0.0);
    let pts = vec![Jet::constant(z, shape); 2];
    let a = CurvePoint::from_fractions(0, 1, 2).unwrap();
    let expected = f_eval(
        &ThetaFunction::sigma_d(2).unwrap(),
        &[1, 1],
        &lift(&a, 0, 0, &p),
        &pts,
        shape,
        &p,
    )
    .unwrap()
    .constant_term();
    let got = value(&o, "F");
    assert!(got.re.is_finite() && got.im.is_finite());
    assert!((got - expected).norm() <= 1e-12 * expected.norm());
}

#[test]
fn r_and_sigma_d() {
    let o = ellsigma(&["eval", "R", "--m", "2,0", "--a", "0,1/2", "--z", "0.1"]);
    assert!(o.status.success());
    assert!(value(&o, "R").norm() > 1e-6);
    let o = ellsigma(&["eval", "sigma_d", "--z", "0.1,0.2", "--z", "-0.3+1i"]);
    assert!(o.status.success());
    let p = CurveParams::square();
    let expected = ellsigma::sigma(Complex64::new(0.1, 0.2), &p)
        * ellsigma::sigma(Complex64::new(-0.3, 1.0), &p);
    assert!((value(&o, "sigma_d") - expected).norm() <= 1e-13 * expected.norm());
}

#[test]
fn domain_and_usage_errors() {
    let o = ellsigma(&["eval", "R", "--m", "1,0", "--a", "0,1/2", "--z", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not in the lattice"));
    let o = ellsigma(&["eval", "sigma", "--z", "1", "--tau=-i"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ellsigma(&["verify", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ellsigma(&["eval", "sigma", "--z", "oops"]);
    assert!(!o.status.success());
}

#[test]
fn smoke_run_of_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = ellsigma(&[
        "verify",
        "all",
        "--trials",
        "1",
        "--seed",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["schema_version"], "1");
    let names: Vec<&str> = r["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ellsigma::verify::SUITES.to_vec());
}

#[test]
fn named_suite_runs() {
    let o = ellsigma(&[
        "verify",
        "gamma_thm9",
        "--d",
        "2",
        "--torsion-bound",
        "4",
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["suites"][0]["trials"], 100);
    assert_eq!(r["pass"], true);
    let o = ellsigma(&["verify", "sigma_laws", "--tau", "i", "--trials", "500"]);
    assert!(o.status.success());
}

#[test]
fn failing_suite_sets_exit_status() {
    let o = ellsigma(&["verify", "transfer", "--trials", "2", "--tol", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_repeat_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |mut v: serde_json::Value| {
        for s in v["suites"].as_array_mut().unwrap() {
            s["wall_time_s"] = serde_json::Value::Null;
        }
        v
    };
    let mut seen = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let o = ellsigma(&[
            "verify",
            "all",
            "--trials",
            "2",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        seen.push(strip(report(&out)));
    }
    assert_eq!(seen[0], seen[1]);
}
