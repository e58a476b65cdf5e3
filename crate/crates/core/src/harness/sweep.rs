//! Parameter sweeps over a base experiment.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{run_compare, ErrorReport, ExperimentConfig};
use crate::error::{Error, Result};

/// One sweep axis: a JSON pointer into the config and the values it takes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    /// RFC 6901 pointer, e.g. `/problem/spec/lambda`.
    pub pointer: String,
    pub values: Vec<Value>,
}

/// A base experiment and the grid to run it over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub axes: Vec<SweepAxis>,
}

impl SweepConfig {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: SweepConfig = serde_json::from_str(&text)?;
        cfg.base.validate()?;
        Ok(cfg)
    }

    pub fn run(&self) -> Result<SweepResult> {
        run_sweep(&self.base, &self.axes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub assignments: Vec<(String, Value)>,
    pub report: ErrorReport,
    /// For oscillatory runs: sup error over that of the previous point.
    pub error_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub base: String,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn reports(&self) -> Vec<ErrorReport> {
        self.points.iter().map(|p| p.report.clone()).collect()
    }
}

type Assignments = Vec<(String, Value)>;

fn expand(base: &ExperimentConfig, axes: &[SweepAxis]) -> Result<Vec<(Assignments, ExperimentConfig)>> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let root = serde_json::to_value(base)?;
    for axis in axes {
        if root.pointer(&axis.pointer).is_none() {
            return Err(Error::Config(format!(
                "sweep pointer {} not found in config",
                axis.pointer
            )));
        }
    }
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        // last axis varies fastest
        let mut rem = flat;
        let mut picks = vec![0; axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            picks[k] = rem % axis.values.len();
            rem /= axis.values.len();
        }
        let mut doc = root.clone();
        let mut assignments = Vec::with_capacity(axes.len());
        let mut label = base.name.clone();
        for (axis, &p) in axes.iter().zip(&picks) {
            let value = axis.values[p].clone();
            *doc.pointer_mut(&axis.pointer).expect("pointer checked above") = value.clone();
            let key = axis.pointer.rsplit('/').next().unwrap_or(&axis.pointer);
            label.push_str(&format!("[{key}={value}]"));
            assignments.push((axis.pointer.clone(), value));
        }
        let mut cfg: ExperimentConfig = serde_json::from_value(doc)?;
        cfg.name = label;
        out.push((assignments, cfg));
    }
    Ok(out)
}

fn run_all(cfgs: &[ExperimentConfig]) -> Vec<ErrorReport> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cfgs.par_iter().map(run_compare).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cfgs.iter().map(run_compare).collect()
    }
}

/// Runs the cartesian product of `axes` applied to `base`. Points come back
/// in grid order whatever the execution order; failures stay in their
/// reports and do not stop the sweep.
pub fn run_sweep(base: &ExperimentConfig, axes: &[SweepAxis]) -> Result<SweepResult> {
    let grid = expand(base, axes)?;
    let (assignments, cfgs): (Vec<_>, Vec<_>) = grid.into_iter().unzip();
    let reports = run_all(&cfgs);
    let mut points: Vec<SweepPoint> = Vec::with_capacity(reports.len());
    for (index, (assignments, report)) in assignments.into_iter().zip(reports).enumerate() {
        let error_ratio = match (
            points.last().and_then(|p| p.report.regime.as_ref()),
            report.regime.as_ref(),
        ) {
            (Some(prev), Some(cur)) if prev.sup_error > 0.0 => Some(cur.sup_error / prev.sup_error),
            _ => None,
        };
        points.push(SweepPoint {
            index,
            assignments,
            report,
            error_ratio,
        });
    }
    Ok(SweepResult {
        base: base.name.clone(),
        points,
    })
}
