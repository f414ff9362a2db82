use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl2gauss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn tau_vanishes_when_p_divides_r() {
    let out = run(&[
        "tau", "--p", "3", "--l", "2", "--family", "x2", "--alpha", "0", "--eps", "2", "--i",
        "0,0,0", "--r", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["degree"], 6);
    assert_eq!(v["family"], "X2");
    assert!(v["tau"]["exact"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c == 0));
    assert_eq!(v["tau"]["complex"]["re"], 0.0);
}

#[test]
fn tau_paths_agree() {
    let base = [
        "tau", "--p", "3", "--l", "2", "--family", "x3", "--alpha", "1", "--i", "0,0", "--j",
        "1,0,2", "--r", "2",
    ];
    let mut outputs = Vec::new();
    for path in ["closed", "subgroup", "full"] {
        let mut args = base.to_vec();
        args.extend(["--path", path]);
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(json(&out)["tau"].clone());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn count_matches_formulas() {
    let out = run(&["count", "--p", "3", "--l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(
        (v["X1"].as_u64(), v["X2"].as_u64(), v["X3"].as_u64()),
        (Some(12), Some(24), Some(18))
    );
}

#[test]
fn glsum_normalized_value() {
    let out = run(&["glsum", "--p", "3", "--l", "2", "--c", "2"]);
    let v = json(&out);
    assert_eq!(v["primitive"], true);
    let re = v["g"]["complex"]["re"].as_f64().unwrap();
    let im = v["g"]["complex"]["im"].as_f64().unwrap();
    assert!(((re * re + im * im).sqrt() - 3.0).abs() < 1e-9);
    let brute = run(&["glsum", "--p", "3", "--l", "2", "--c", "2", "--brute"]);
    assert_eq!(json(&brute)["g"], v["g"]);
}

#[test]
fn psum_reports_case() {
    let out = run(&[
        "psum", "--p", "3", "--i", "2", "--j", "2", "--k", "2", "--beta", "1", "--b", "1",
    ]);
    let v = json(&out);
    assert_eq!(v["case"], "i");
    assert_eq!(v["P1"]["complex"]["re"], 6.0);
    let out = run(&[
        "psum", "--p", "3", "--i", "2", "--j", "1", "--k", "1", "--beta", "1", "--b", "1",
    ]);
    assert_eq!(json(&out)["closed_form"], false);
}

#[test]
fn verify_gauss_passes() {
    let out = run(&["verify", "--suite", "gauss", "--p", "3", "--l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().last().unwrap().starts_with("72/72"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "tau", "--p", "3", "--l", "2", "--family", "x1", "--i", "1", "--j", "1", "--r", "4",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(
        run(&["tau", "--p", "4", "--l", "2", "--family", "x1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["tau", "--p", "3", "--l", "2", "--family", "x2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let capped = run(&[
        "tau",
        "--p",
        "3",
        "--l",
        "2",
        "--family",
        "x1",
        "--path",
        "full",
        "--max-enum",
        "100",
    ]);
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn bench_emits_csv() {
    let out = run(&[
        "bench", "--p", "3", "--l", "2", "--family", "x2", "--reps", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "path,p,l,family,nanoseconds");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("closed,3,2,X2,"));
}
