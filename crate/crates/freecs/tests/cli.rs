use std::path::Path;
use std::process::{Command, Output};

fn freecs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freecs"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&freecs(&["--help"])), 0);
    assert_eq!(code(&freecs(&["--version"])), 0);
    assert_eq!(code(&freecs(&["field", "--help"])), 0);
}

#[test]
fn bad_arguments_are_config_errors() {
    assert_eq!(code(&freecs(&["nope"])), 1);
    assert_eq!(code(&freecs(&["field", "--grid", "-8:8"])), 1);
    assert_eq!(code(&freecs(&["field", "--tau", "0,x"])), 1);
    assert_eq!(
        code(&freecs(&["field", "--z", "1,0", "--q0", "0", "--p", "2"])),
        1
    );
}

#[test]
fn corrupted_family_exits_one() {
    let out = freecs(&["verify", "--c1", "1,0", "--c2", "1,0"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 Re(c1* c2) = 2"));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("f.csv");
    assert_eq!(code(&freecs(&["field", "--out", path(&target)])), 2);
}

#[test]
fn failing_check_exits_three_with_report() {
    let out = freecs(&["verify", "--check", "moments", "--ref-grid", "-3:3:64"]);
    assert_eq!(code(&out), 3);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["checks"][0]["name"], "moments");
    assert!(report["checks"][0]["error"].is_string());
}

#[test]
fn propagate_check_alone() {
    let out = freecs(&[
        "verify",
        "--check",
        "propagate",
        "--tau0",
        "0",
        "--tau1",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert!(checks[0]["value"].as_f64().unwrap() < 1e-8);
}

#[test]
fn symmetric_vacuum_at_tau_zero() {
    let out = freecs(&["field", "--tau", "0", "--grid", "-4:4:81"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 81);
    for (a, b) in rows.iter().zip(rows.iter().rev()) {
        assert!((a[1] + b[1]).abs() < 1e-14);
        assert!((a[4] - b[4]).abs() < 1e-14);
    }
    assert_eq!(rows[40][1], 0.0);
}

#[test]
fn per_tau_files_match_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let long = dir.path().join("long.csv");
    let split = dir.path().join("split.csv");
    let common = [
        "field", "--p", "2", "--tau", "0,0.5,1", "--grid", "-6:6:121",
    ];
    let mut args = common.to_vec();
    args.extend(["--out", path(&long)]);
    assert_eq!(code(&freecs(&args)), 0);
    let mut args = common.to_vec();
    args.extend(["--per-tau", "--out", path(&split)]);
    assert_eq!(code(&freecs(&args)), 0);

    let long_text = std::fs::read_to_string(&long).unwrap();
    let mut long_rows = long_text.lines().skip(1);
    for (k, tau) in ["0", "0.5", "1"].iter().enumerate() {
        let part = std::fs::read_to_string(dir.path().join(format!("split_{k}.csv"))).unwrap();
        let mut lines = part.lines();
        assert_eq!(lines.next(), Some("q,re,im,density"));
        for line in lines {
            assert_eq!(long_rows.next().unwrap(), format!("{tau},{line}"));
        }
        let meta: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join(format!("split_{k}.json"))).unwrap(),
        )
        .unwrap();
        assert_eq!(meta["tau"].as_f64().unwrap(), tau.parse::<f64>().unwrap());
    }
    assert!(long_rows.next().is_none());
}

#[test]
fn per_tau_needs_out() {
    assert_eq!(code(&freecs(&["field", "--per-tau"])), 1);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"family": {"sigma_q": 0.7071067811865476}, "q0": 0.0, "p": 2.0, "tau": [0.0, 1.0]}"#,
    )
    .unwrap();
    let from_file = freecs(&["moments", "--config", path(&cfg)]);
    assert_eq!(code(&from_file), 0);
    let text = String::from_utf8(from_file.stdout).unwrap();
    let row1: Vec<f64> = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(row1[0], 1.0);
    assert!((row1[1] - 2.0).abs() < 1e-15);
    assert!((row1[3] - 1.0).abs() < 1e-15);

    let overridden = freecs(&["moments", "--config", path(&cfg), "--tau", "2", "--p", "-1"]);
    let text = String::from_utf8(overridden.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let row: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert!((row[1] + 2.0).abs() < 1e-15);
    assert!((row[2] + 1.0).abs() < 1e-15);
}

#[test]
fn malformed_config_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"family": {"sigma_q": -1}}"#).unwrap();
    assert_eq!(code(&freecs(&["field", "--config", path(&cfg)])), 1);
    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(code(&freecs(&["field", "--config", path(&cfg)])), 1);
    assert_eq!(
        code(&freecs(&[
            "field",
            "--config",
            path(&dir.path().join("absent.json"))
        ])),
        1
    );
}

#[test]
fn moments_with_oracle_agree() {
    let out = freecs(&["moments", "--p", "1", "--tau", "0,1,2", "--with-oracle"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("tau,mean_q,mean_p,sigma_q,sigma_p,sigma_qp,rs_product,heisenberg,quad_")
    );
    for line in text.lines().skip(1) {
        let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff < 1e-8);
    }
}

#[test]
fn classify_examples() {
    let out = freecs(&["classify", "--velocity-ms", "1e3", "--sigma-x-m", "5e-8"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "marginal");

    let out = freecs(&["classify", "--velocity-ms", "1e7", "--sigma-x-m", "1e-6"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "semiclassical");

    assert_eq!(
        code(&freecs(&[
            "classify",
            "--velocity-ms",
            "1",
            "--sigma-x-m",
            "-1"
        ])),
        1
    );
}

#[test]
fn completeness_truncation_exits_three() {
    assert_eq!(
        code(&freecs(&["completeness", "--tau", "0", "--radius", "1"])),
        3
    );
    assert_eq!(code(&freecs(&["completeness", "--tau", "0"])), 0);
}
