//! CSV, JSON, summary and plot-series writers.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::warn;
use serde_json::json;

use crate::suites::{CheckRow, SuiteResult};

pub const CSV_HEADER: [&str; 12] = [
    "suite",
    "check",
    "param",
    "lhs",
    "rhs",
    "ratio",
    "target",
    "slack",
    "err",
    "tolerance",
    "pass",
    "error",
];

/// 17 significant digits, lowercase scientific notation.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn row_fields(r: &CheckRow) -> Vec<String> {
    vec![
        r.suite.clone(),
        r.check.clone(),
        r.param.map(format_number).unwrap_or_default(),
        format_number(r.lhs),
        format_number(r.rhs),
        format_number(r.ratio),
        format_number(r.target),
        format_number(r.slack),
        format_number(r.err),
        format_number(r.tolerance),
        r.pass.to_string(),
        r.error.clone().unwrap_or_default(),
    ]
}

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// The report rows as CSV text.
pub fn render_csv(result: &SuiteResult) -> io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for r in &result.rows {
        w.write_record(row_fields(r)).map_err(csv_error)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| io::Error::other(e.to_string()))?;
    String::from_utf8(bytes).map_err(io::Error::other)
}

fn json_number(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// The report rows as JSON with the CSV field names.
pub fn render_json(result: &SuiteResult) -> io::Result<String> {
    let rows: Vec<serde_json::Value> = result
        .rows
        .iter()
        .map(|r| {
            json!({
                "suite": r.suite,
                "check": r.check,
                "param": r.param.map(json_number),
                "lhs": json_number(r.lhs),
                "rhs": json_number(r.rhs),
                "ratio": json_number(r.ratio),
                "target": json_number(r.target),
                "slack": json_number(r.slack),
                "err": json_number(r.err),
                "tolerance": json_number(r.tolerance),
                "pass": r.pass,
                "error": r.error,
            })
        })
        .collect();
    let doc = json!({
        "suite": result.suite.name(),
        "pass": result.pass,
        "config_hash": result.config_hash,
        "seed": result.seed,
        "wall_time_seconds": result.wall_time_seconds,
        "rows": rows,
    });
    serde_json::to_string_pretty(&doc).map_err(io::Error::other)
}

pub fn render_summary(result: &SuiteResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("suite        {}\n", result.suite));
    out.push_str(&format!("config hash  {}\n", result.config_hash));
    out.push_str(&format!("seed         {}\n", result.seed));
    out.push_str(&format!("wall time    {:.3} s\n", result.wall_time_seconds));
    out.push_str(&format!(
        "checks       {} run, {} failed\n",
        result.rows.len(),
        result.failures()
    ));
    out.push_str(&format!(
        "result       {}\n\n",
        if result.pass { "PASS" } else { "FAIL" }
    ));
    out.push_str(&format!(
        "{:<4}  {:<11}  {:<58}  {:>12}  {:>14}  {:>12}  {:>11}  {:>10}\n",
        "", "suite", "check", "param", "ratio", "target", "slack", "tolerance"
    ));
    for r in &result.rows {
        let param = r.param.map(|p| format!("{p:.4e}")).unwrap_or_default();
        out.push_str(&format!(
            "{:<4}  {:<11}  {:<58}  {:>12}  {:>14.10}  {:>12.6}  {:>11.3e}  {:>10.2e}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.check,
            param,
            r.ratio,
            r.target,
            r.slack,
            r.tolerance
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!("      error: {e}\n"));
        }
    }
    out
}

/// Writes `<suite>.csv`, `<suite>.json` and `summary.txt`.
pub fn write_outputs(result: &SuiteResult, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = result.suite.name();
    let files = [
        (dir.join(format!("{name}.csv")), render_csv(result)?),
        (dir.join(format!("{name}.json")), render_json(result)?),
        (dir.join("summary.txt"), render_summary(result)),
    ];
    let mut written = Vec::new();
    for (path, text) in files {
        fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}

/// Writes one `plot_<name>.csv` per series; nothing is written for an empty result.
pub fn emit_plot_data(result: &SuiteResult, dir: &Path) -> io::Result<Vec<PathBuf>> {
    let series: Vec<_> = result.plots.iter().filter(|p| !p.rows.is_empty()).collect();
    if series.is_empty() {
        warn!("suite {} produced no plot data", result.suite);
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for p in series {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&p.header).map_err(csv_error)?;
        for row in &p.rows {
            w.write_record(row.iter().map(|&x| format_number(x)))
                .map_err(csv_error)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| io::Error::other(e.to_string()))?;
        let path = dir.join(format!("plot_{}.csv", p.name));
        fs::write(&path, bytes)?;
        written.push(path);
    }
    Ok(written)
}
