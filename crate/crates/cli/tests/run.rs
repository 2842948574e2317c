use std::fs;
use std::path::Path;
use std::process::Command;

use sharplab_cli::{emit_plot_data, parse_config, run_suite, write_outputs, RunConfig, Suite};

const BIN: &str = env!("CARGO_BIN_EXE_sharplab");

fn sharplab(args: &[&str]) -> i32 {
    Command::new(BIN)
        .args(args)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

fn config_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn identities_rows_and_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        sharplab(&["--config", &config_path("identities.toml"), "--out", out]),
        0
    );
    let first = fs::read(dir.path().join("identities.csv")).unwrap();
    assert_eq!(
        sharplab(&["--config", &config_path("identities.toml"), "--out", out]),
        0
    );
    assert_eq!(first, fs::read(dir.path().join("identities.csv")).unwrap());

    let text = String::from_utf8(first).unwrap();
    let mut rows = text.lines();
    assert_eq!(
        rows.next().unwrap(),
        "suite,check,param,lhs,rhs,ratio,target,slack,err,tolerance,pass,error"
    );
    let identity: Vec<&str> = text.lines().filter(|l| l.contains("QR/P^2")).collect();
    assert_eq!(identity.len(), 5);
    for line in identity {
        let f: Vec<&str> = line.split(',').collect();
        let ratio: f64 = f[5].parse().unwrap();
        assert!((ratio - 4.0 / 9.0).abs() < 1e-6);
        assert_eq!(f[10], "true");
    }
    assert!(!text.contains("nan") && !text.contains("inf"));
    assert!(fs::read_to_string(dir.path().join("summary.txt"))
        .unwrap()
        .contains("result       PASS"));
}

#[test]
fn json_mirrors_csv_fields() {
    let config =
        parse_config(&fs::read_to_string(config_path("flat-hpw-lp4.toml")).unwrap()).unwrap();
    let result = run_suite(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&result, dir.path()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("flat-hpw.json")).unwrap())
            .unwrap();
    let csv = fs::read_to_string(dir.path().join("flat-hpw.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    for row in rows {
        let keys: Vec<&str> = row
            .as_object()
            .unwrap()
            .keys()
            .map(|k| k.as_str())
            .collect();
        let mut expected = header.clone();
        expected.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, expected);
    }
    assert_eq!(json["pass"], true);
}

#[test]
fn ko_refute_passes_with_zero_sign_changes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        sharplab(&[
            "--suite",
            "ko-refute",
            "--out",
            dir.path().to_str().unwrap()
        ]),
        0
    );
    let csv = fs::read_to_string(dir.path().join("ko-refute.csv")).unwrap();
    let line = csv.lines().find(|l| l.contains("sign changes")).unwrap();
    assert!(line.contains(",0.0000000000000000e0,") && line.ends_with("true,"));
    let phi = fs::read_to_string(dir.path().join("plot_ko_phi.csv")).unwrap();
    let values: Vec<f64> = phi
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 4096);
    assert!(values.iter().all(|&v| v > 0.0));
}

#[test]
fn hardy_plot_series_is_decreasing() {
    let result = run_suite(&RunConfig::new(Suite::FlatHardy)).unwrap();
    let plot = result
        .plots
        .iter()
        .find(|p| p.name == "hardy_quotient")
        .unwrap();
    assert!(plot
        .rows
        .windows(2)
        .all(|w| w[1][1] > w[0][1] && w[1][2] < w[0][2]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // zero tolerance makes the floating-point equality checks fail
    assert_eq!(
        sharplab(&["--suite", "flat-hpw", "--tolerance", "0", "--out", out]),
        1
    );
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        "suite = \"identities\"\n[triple]\nn = 5\np = 3.0\nq = 1.0\n",
    )
    .unwrap();
    assert_eq!(
        sharplab(&["--config", bad.to_str().unwrap(), "--out", out]),
        2
    );
    assert_eq!(sharplab(&["--out", out]), 2);
    assert_eq!(
        sharplab(&["--suite", "chpw-bounds", "--seed", "99", "--out", out]),
        0
    );
}

#[test]
fn empty_plot_data_writes_nothing() {
    let result = run_suite(&RunConfig::new(Suite::Identities)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(emit_plot_data(&result, dir.path()).unwrap().is_empty());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn computation_errors_become_failing_rows() {
    let mut config = RunConfig::new(Suite::FlatHpw);
    config.quadrature = Some(sharplab::QuadratureSpec {
        max_subdivisions: 1,
        relative_tolerance: 1e-15,
        ..Default::default()
    });
    let result = run_suite(&config).unwrap();
    assert!(!result.pass);
    assert!(result.rows.iter().any(|r| r.error.is_some()));
}
