use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const ORTHONORMAL: &str = r#"{
  "operator": { "atoms": [
    { "z": { "re": 0.5, "im": 0.0 }, "weight": 1.0 },
    { "z": { "re": 0.0, "im": 0.25 }, "weight": 1.0 }
  ] },
  "seeds": [
    [ { "re": 1.0, "im": 0.0 }, { "re": 0.0, "im": 0.0 } ],
    [ { "re": 0.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 } ]
  ],
  "scaling": { "type": "unscaled" },
  "truncation": 1
}"#;

/// One atom at 1/2 with coefficients c_n = 1: the product |c_n| ||A^n x||
/// is 2^-n, so only n = 0 and n = 1 reach delta = 1/2.
const DECAYING: &str = r#"{
  "operator": { "atoms": [ { "z": { "re": 0.5, "im": 0.0 }, "weight": 1.0 } ] },
  "seeds": [ [ { "re": 1.0, "im": 0.0 } ] ],
  "scaling": { "type": "explicit", "coefficients": [ [
    { "re": 1.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 },
    { "re": 1.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 },
    { "re": 1.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 }
  ] ] },
  "truncation": 8
}"#;

const TWO_ATOM: &str = r#"{
  "operator": { "atoms": [
    { "z": { "re": 0.5, "im": 0.0 }, "weight": 1.0 },
    { "z": { "re": 0.9, "im": 0.0 }, "weight": 1.0 }
  ] },
  "seeds": [ [ { "re": 1.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 } ] ],
  "scaling": { "type": "normalized" },
  "truncation": 20
}"#;

fn framelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_framelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn frame_bounds_of_orthonormal_family() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "on.json", ORTHONORMAL);
    let out = dir.path().join("report.json");
    let o = framelab(&["frame-bounds", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 1);
    let v = json(&out);
    assert!((v["lower"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["upper"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["complete"], true);
}

#[test]
fn incomplete_family_exits_one() {
    let dir = TempDir::new().unwrap();
    let text = ORTHONORMAL.replace(
        r#"[ { "re": 0.0, "im": 0.0 }, { "re": 1.0, "im": 0.0 } ]"#,
        r#"[ { "re": 2.0, "im": 0.0 }, { "re": 0.0, "im": 0.0 } ]"#,
    );
    let cfg = write(&dir, "inc.json", &text);
    assert_eq!(framelab(&["frame-bounds", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn check_b_failing_delta_exits_one_with_witness() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "b.json", DECAYING);
    let out = dir.path().join("b.json.out");
    let o = framelab(&[
        "check-b",
        "--config",
        &cfg,
        "--param",
        "eta=0,delta=0.5,gap_cap=2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let v = json(&out);
    assert_eq!(v["verdict"], "fail");
    let seed = &v["witness"]["seeds"][0];
    assert_eq!(seed["good_count"], 2);
    assert_eq!(seed["last_good"], 1);
    assert_eq!(seed["trailing_gap"], 6);

    let o = framelab(&["check-b", "--config", &cfg, "--param", "delta=0.001", "--param", "gap_cap=1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.json");
    let o = framelab(&["frame-bounds", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("error:"));

    let bad = write(&dir, "bad.json", &ORTHONORMAL.replace(r#""weight": 1.0 },"#, r#""weight": -1.0 },"#));
    let o = framelab(&["frame-bounds", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("atoms[0].weight"), "{}", stdout(&o));

    let cfg = write(&dir, "b.json", DECAYING);
    assert_eq!(framelab(&["check-b", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(framelab(&["sweep", "--dims", "8,16"]).status.code(), Some(2));
    assert_eq!(framelab(&["not-a-command"]).status.code(), Some(2));
}

#[test]
fn norm_ratio_csv_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "two.json", TWO_ATOM);
    let out = dir.path().join("rho.csv");
    let o = framelab(&[
        "norm-ratio",
        "--config",
        &cfg,
        "--param",
        "N=200",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,rho"));
    let rho: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(rho.len(), 200);
    assert!(rho.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!((rho[199] - 0.9).abs() <= 1e-3);
}

#[test]
fn carleson_and_concentration_reports() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "two.json", TWO_ATOM);
    let out = dir.path().join("c.json");
    let o = framelab(&["carleson", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&out);
    // rho(0.5, 0.9) = 0.4 / 0.55
    assert!((v["delta"].as_f64().unwrap() - 0.4 / 0.55).abs() < 1e-12);
    assert_eq!(v["split"]["verdict"], "pass");

    let out = dir.path().join("k.csv");
    let o = framelab(&[
        "concentration",
        "--config",
        &cfg,
        "--param",
        "delta=0.1",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("radius_index,radius,offender_count"));
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(2), Some("1"));
}

#[test]
fn sweep_reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let o = framelab(&[
            "sweep",
            "--preset",
            "annulus",
            "--dims",
            "4,8",
            "--rng-seed",
            "7",
            "--format",
            "csv",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert!(bytes.starts_with(b"d,M,lower,upper,ratio\n"));
}
