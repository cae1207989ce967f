use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ruled-slant"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/analysis-report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, report: &Value, label: &str) {
    let errors: Vec<String> = v
        .iter_errors(report)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{label}: {errors:#?}");
}

#[test]
fn reports_validate_against_the_schema() {
    let v = validator();
    let cases: Vec<Vec<&str>> = vec![
        vec!["--preset", "helicoid", "--u", "0:6.283185307179586:40"],
        vec![
            "--preset",
            "cone-theta",
            "--theta",
            "1.0",
            "--u",
            "0:6.283185307179586:40",
        ],
        vec!["--preset", "slant-family-c", "--c", "1", "--u", "-0.9:0.9:40"],
        vec!["--preset", "quadratic", "--u", "0.5:2:40"],
        vec!["--preset", "nonslant-mixed", "--u", "0.5:3:40"],
        vec![
            "--base",
            "u, 0, 0",
            "--director",
            "0, cos(u), sin(u) + 0.3",
            "--u",
            "0:3:40",
        ],
    ];
    for args in cases {
        let mut full = vec!["analyze"];
        full.extend(&args);
        let out = run(&full);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_valid(&v, &report, &args.join(" "));
        assert_eq!(report["consistency"]["disagreement"], false, "{args:?}");
    }
}

#[test]
fn analyze_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = bin()
        .args(["analyze", "--preset", "quadratic", "--u", "0.5:2:17", "--out"])
        .arg(&json)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["slant"]["q_slant"]["verdict"], "no");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("u,s_q,qx"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 17);
    let kappa_col = header.split(',').position(|c| c == "kappa_q").unwrap();
    let first: f64 = rows[0].split(',').nth(kappa_col).unwrap().parse().unwrap();
    assert!((first - 0.25).abs() <= 1e-9);
}

#[test]
fn mesh_is_a_valid_obj() {
    let out = run(&["mesh", "--preset", "helicoid", "--vmax", "1", "--nu", "64", "--nv", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let vertices: Vec<[f64; 3]> = text
        .lines()
        .filter_map(|l| l.strip_prefix("v "))
        .map(|l| {
            let xs: Vec<f64> = l.split(' ').map(|x| x.parse().unwrap()).collect();
            [xs[0], xs[1], xs[2]]
        })
        .collect();
    assert_eq!(vertices.len(), 64 * 9 + 64);
    let faces: Vec<Vec<usize>> = text
        .lines()
        .filter_map(|l| l.strip_prefix("f "))
        .map(|l| l.split(' ').map(|i| i.parse().unwrap()).collect())
        .collect();
    assert_eq!(faces.len(), 2 * 63 * 8);
    assert!(faces.iter().flatten().all(|&i| (1..=64 * 9).contains(&i)));
    let line: Vec<usize> = text
        .lines()
        .find_map(|l| l.strip_prefix("l "))
        .unwrap()
        .split(' ')
        .map(|i| i.parse().unwrap())
        .collect();
    assert_eq!(line.len(), 64);
    // helicoid striction curve is the z axis
    for &i in &line {
        let p = vertices[i - 1];
        assert!(p[0].abs() <= 1e-12 && p[1].abs() <= 1e-12);
    }
}

#[test]
fn cone_mesh_striction_is_the_apex() {
    let out = run(&["mesh", "--preset", "cone-theta", "--nu", "32", "--nv", "5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let striction = text.split("# striction curve").nth(1).unwrap();
    for l in striction.lines().filter_map(|l| l.strip_prefix("v ")) {
        for x in l.split(' ') {
            assert!(x.parse::<f64>().unwrap().abs() <= 1e-10);
        }
    }
}

#[test]
fn exit_codes() {
    let cylinder = run(&["analyze", "--director", "0,0,1", "--u", "0:1:8"]);
    assert_eq!(cylinder.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&cylinder.stderr).contains("cylindrical"));

    assert_eq!(
        run(&["mesh", "--preset", "helicoid", "--nv", "0"]).status.code(),
        Some(1)
    );
    let unknown = run(&["analyze", "--preset", "bogus"]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("helicoid"));
    assert_eq!(
        run(&["analyze", "--preset", "helicoid", "--u", "0:1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["analyze", "--preset", "helicoid", "--out", "/nonexistent/dir/r.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn synth_round_trip_from_the_command_line() {
    let out = run(&["synth", "--kappa", "s", "--s", "0:1.5", "--steps", "3000"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["round_trip_error"].as_f64().unwrap() <= 1e-6);
    assert!(v["max_gram_defect_after"].as_f64().unwrap() <= 1e-14);
    let preset = run(&["synth", "--preset", "slant-family-c", "--c", "0.5", "--steps", "400"]);
    assert!(preset.status.success());
    assert_eq!(run(&["synth", "--preset", "helicoid"]).status.code(), Some(1));
}

#[test]
fn classify_and_residual_views() {
    let out = run(&["classify", "--preset", "slant-family-c", "--u", "-1.8:1.8:64"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["slant"]["h_slant"]["verdict"], "yes");
    assert_eq!(v["slant"]["q_slant"]["verdict"], "no");
    assert_eq!(v["slant"]["axis_kind"], "H");

    let out = run(&["residuals", "--preset", "slant-family-c", "--u", "-1.8:1.8:64"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let residuals = v["ode_residuals"].as_array().unwrap();
    assert_eq!(residuals.len(), 9);
    for r in residuals {
        let h_group = ["QH3", "HH2", "AH3"].contains(&r["kind"].as_str().unwrap());
        assert_eq!(r["satisfied"], h_group, "{}", r["kind"]);
    }
}
