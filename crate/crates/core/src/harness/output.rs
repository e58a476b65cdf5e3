//! Writing experiment results to disk.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ErrorReport, ExperimentConfig, ProfileRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Matplotlib script: profiles at each comparison time and a front panel.
pub const PLOT_SCRIPT: &str = r#"#!/usr/bin/env python3
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent


def rows(name):
    path = here / name
    if not path.exists():
        return []
    with path.open() as f:
        return list(csv.DictReader(f))


profiles = defaultdict(lambda: defaultdict(list))
for r in rows("profiles.csv"):
    p = profiles[r["experiment"]][float(r["t"])]
    p.append((float(r["x"]), float(r["u_num"]), float(r["u_an"])))

fronts = defaultdict(list)
for r in rows("fronts.csv"):
    num = float(r["x_numeric"]) if r["x_numeric"] else None
    fronts[r["experiment"]].append((float(r["t"]), float(r["x_analytic"]), num))

for name in sorted(set(profiles) | set(fronts)):
    fig, (ax, bx) = plt.subplots(1, 2, figsize=(10, 4))
    top = 0.0
    for i, (t, pts) in enumerate(sorted(profiles[name].items())):
        x, un, ua = zip(*pts)
        top = max(top, max(ua))
        colour = f"C{i % 10}"
        ax.plot(x, un, "-", color=colour, label=f"numeric t={t:g}")
        ax.plot(x, ua, "--", color=colour, label=f"analytic t={t:g}")
    if top > 0:
        # the wall boundary layer at x = L is not part of the analytic solution
        ax.set_ylim(-0.05 * top, 1.3 * top)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(fontsize="small")
    ax.set_title(name)
    pts = sorted(fronts[name], key=lambda p: p[0])
    if pts:
        t, xa, _ = zip(*pts)
        bx.plot(t, xa, "-k", label="analytic")
        num = [(ti, xi) for ti, _, xi in pts if xi is not None]
        if num:
            bx.plot(*zip(*num), "o", color="C3", label="numeric")
        bx.legend(fontsize="small")
    bx.set_xlabel("t")
    bx.set_ylabel("front position")
    fig.tight_layout()
    safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in name)
    fig.savefig(here / f"{safe}.png", dpi=120)
    plt.close(fig)
"#;

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    experiment: &'a str,
    t: Option<f64>,
    front_analytic: Option<f64>,
    front_numeric: Option<f64>,
    front_error: Option<f64>,
    front_tolerance: Option<f64>,
    window_lo: Option<f64>,
    window_hi: Option<f64>,
    sup_error: Option<f64>,
    l2_error: Option<f64>,
    layer_width: Option<f64>,
    layer_width_expected: Option<f64>,
    regime: Option<&'static str>,
    regime_sup_error: Option<f64>,
    passed: bool,
    failure: Option<&'a str>,
}

fn summary_rows(report: &ErrorReport) -> Vec<SummaryRow<'_>> {
    let blank = SummaryRow {
        experiment: &report.experiment,
        t: None,
        front_analytic: None,
        front_numeric: None,
        front_error: None,
        front_tolerance: None,
        window_lo: None,
        window_hi: None,
        sup_error: None,
        l2_error: None,
        layer_width: None,
        layer_width_expected: None,
        regime: report.regime.as_ref().map(|r| r.regime.name()),
        regime_sup_error: report.regime.as_ref().map(|r| r.sup_error),
        passed: report.passed,
        failure: report.failure.as_deref(),
    };
    if report.times.is_empty() {
        return vec![blank];
    }
    report
        .times
        .iter()
        .map(|r| SummaryRow {
            t: Some(r.t),
            front_analytic: Some(r.front_analytic),
            front_numeric: r.front_numeric,
            front_error: r.front_error,
            front_tolerance: Some(r.front_tolerance),
            window_lo: r.window.map(|w| w[0]),
            window_hi: r.window.map(|w| w[1]),
            sup_error: r.sup_error,
            l2_error: r.l2_error,
            layer_width: r.layer_width,
            layer_width_expected: Some(r.layer_width_expected),
            passed: r.passed,
            ..blank
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRecord {
    experiment: String,
    t: f64,
    x: f64,
    u_num: f64,
    u_an: f64,
}

#[derive(Debug, Serialize)]
struct FrontRecord<'a> {
    experiment: &'a str,
    t: f64,
    x_analytic: f64,
    x_numeric: Option<f64>,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let io = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}")),
    };
    Error::io(path, io)
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

const SUMMARY_HEADER: &[&str] = &[
    "experiment",
    "t",
    "front_analytic",
    "front_numeric",
    "front_error",
    "front_tolerance",
    "window_lo",
    "window_hi",
    "sup_error",
    "l2_error",
    "layer_width",
    "layer_width_expected",
    "regime",
    "regime_sup_error",
    "passed",
    "failure",
];

/// Writes `config.json`, `profiles.csv`, `fronts.csv`, `summary.csv` (or
/// `summary.json`) and `plot.py` into `dir`, creating it if needed.
pub fn emit_outputs(
    dir: impl AsRef<Path>,
    configs: &[ExperimentConfig],
    reports: &[ErrorReport],
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join("config.json");
    write_text(&path, &(serde_json::to_string_pretty(configs)? + "\n"))?;
    written.push(path);

    let path = dir.join("profiles.csv");
    let profiles = reports.iter().flat_map(|r| {
        r.profiles.iter().map(move |p| ProfileRecord {
            experiment: r.experiment.clone(),
            t: p.t,
            x: p.x,
            u_num: p.u_num,
            u_an: p.u_an,
        })
    });
    write_csv(&path, profiles, &["experiment", "t", "x", "u_num", "u_an"])?;
    written.push(path);

    let path = dir.join("fronts.csv");
    let fronts = reports.iter().flat_map(|r| {
        let dense = r.trajectory.iter().map(move |&[t, x]| FrontRecord {
            experiment: &r.experiment,
            t,
            x_analytic: x,
            x_numeric: None,
        });
        let sampled = r.times.iter().map(move |tr| FrontRecord {
            experiment: &r.experiment,
            t: tr.t,
            x_analytic: tr.front_analytic,
            x_numeric: tr.front_numeric,
        });
        dense.chain(sampled)
    });
    write_csv(&path, fronts, &["experiment", "t", "x_analytic", "x_numeric"])?;
    written.push(path);

    match format {
        OutputFormat::Csv => {
            let path = dir.join("summary.csv");
            write_csv(&path, reports.iter().flat_map(summary_rows), SUMMARY_HEADER)?;
            written.push(path);
        }
        OutputFormat::Json => {
            let path = dir.join("summary.json");
            write_text(&path, &(serde_json::to_string_pretty(reports)? + "\n"))?;
            written.push(path);
        }
    }

    let path = dir.join("plot.py");
    write_text(&path, PLOT_SCRIPT)?;
    written.push(path);
    Ok(written)
}

/// Reads back a `profiles.csv` as (experiment, row) pairs.
pub fn read_profiles_csv(path: impl AsRef<Path>) -> Result<Vec<(String, ProfileRow)>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize::<ProfileRecord>()
        .map(|rec| {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            Ok((
                rec.experiment,
                ProfileRow {
                    t: rec.t,
                    x: rec.x,
                    u_num: rec.u_num,
                    u_an: rec.u_an,
                },
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run_compare;
    use crate::harness::tests::linear_config;

    #[test]
    fn empty_report_set_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        emit_outputs(dir.path(), &[], &[], OutputFormat::Csv).unwrap();
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 1);
        assert!(summary.starts_with("experiment,t,"));
    }

    #[test]
    fn linear_preset_writes_five_files_and_round_trips() {
        let cfg = linear_config(256);
        let report = run_compare(&cfg);
        let dir = tempfile::tempdir().unwrap();
        let files = emit_outputs(
            dir.path(),
            std::slice::from_ref(&cfg),
            std::slice::from_ref(&report),
            OutputFormat::Csv,
        )
        .unwrap();
        assert_eq!(files.len(), 5);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 5);

        let back = read_profiles_csv(dir.path().join("profiles.csv")).unwrap();
        assert_eq!(back.len(), report.profiles.len());
        for ((name, row), orig) in back.iter().zip(&report.profiles) {
            assert_eq!(name, "linear");
            for (a, b) in [
                (row.t, orig.t),
                (row.x, orig.x),
                (row.u_num, orig.u_num),
                (row.u_an, orig.u_an),
            ] {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 1 + cfg.times.len());
        let echoed: Vec<ExperimentConfig> =
            serde_json::from_str(&fs::read_to_string(dir.path().join("config.json")).unwrap()).unwrap();
        assert_eq!(echoed, vec![cfg]);
    }

    #[test]
    fn outputs_are_byte_identical_across_runs() {
        let cfg = linear_config(128);
        let read = |fmt| {
            let dir = tempfile::tempdir().unwrap();
            emit_outputs(dir.path(), std::slice::from_ref(&cfg), &[run_compare(&cfg)], fmt).unwrap();
            ["profiles.csv", "fronts.csv"]
                .iter()
                .map(|f| fs::read(dir.path().join(f)).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(read(OutputFormat::Csv), read(OutputFormat::Json));
    }

    #[test]
    fn json_summary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = linear_config(128);
        let files = emit_outputs(
            dir.path(),
            std::slice::from_ref(&cfg),
            &[run_compare(&cfg)],
            OutputFormat::Json,
        )
        .unwrap();
        assert!(files.iter().any(|p| p.ends_with("summary.json")));
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(v[0]["experiment"], "linear");
    }

    #[test]
    fn io_errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_outputs(blocker.join("sub"), &[], &[], OutputFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("file"));
    }
}
