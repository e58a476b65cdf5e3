//! Experiment runner: analytic solutions against the reference solver.

mod output;
mod sweep;

pub use output::{emit_outputs, read_profiles_csv, OutputFormat, PLOT_SCRIPT};
pub use sweep::{run_sweep, SweepAxis, SweepConfig, SweepPoint, SweepResult};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::characteristics::CharacteristicSolution;
use crate::error::{Error, Result};
use crate::layer::CompositeSolution;
use crate::microdevice::MicrodeviceSpec;
use crate::oscillatory::{self, OscillatorySpec};
use crate::pde::{solve_cell_pde, solve_coupled, GridSolution, SolverConfig};
use crate::problem::ProblemSpec;

/// 10–90 % width of ½(1 + erf(X/(2√τ))) in units of √τ.
const ERF_10_90_WIDTH: f64 = 3.624_775_209_747_293;

const TRAJECTORY_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentSource {
    Transport {
        spec: ProblemSpec,
    },
    Microdevice {
        spec: MicrodeviceSpec,
    },
    /// Reciprocal-density regimes against the reference integrator.
    Oscillatory {
        spec: OscillatorySpec,
        #[serde(default)]
        regime: Option<oscillatory::Regime>,
        t_max: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

fn default_samples() -> usize {
    2001
}

/// Comparison window margins: the window is
/// [x* + front·√(Dt), L − right].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Margins {
    pub front: f64,
    pub right: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Margins { front: 5.0, right: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Interior sup error relative to the plateau.
    pub density: f64,
    /// Front error in units of √(Dt).
    pub front: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            density: 0.05,
            front: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub problem: ExperimentSource,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Comparison times; empty means t_end.
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub margins: Margins,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn t_end(&self) -> f64 {
        match &self.problem {
            ExperimentSource::Transport { spec } => spec.t_end,
            ExperimentSource::Microdevice { spec } => spec.t_end,
            ExperimentSource::Oscillatory { t_max, .. } => *t_max,
        }
    }

    pub fn comparison_times(&self) -> Vec<f64> {
        if self.times.is_empty() {
            vec![self.t_end()]
        } else {
            self.times.clone()
        }
    }

    /// Checks the config and the problem it wraps; returns problem warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut problems = Vec::new();
        let t_end = self.t_end();
        if self.times.iter().any(|&t| !(t > 0.0 && t <= t_end * (1.0 + 1e-12))) {
            problems.push(crate::problem::Violation::new(
                "times",
                format!("comparison times must lie in (0, {t_end}]"),
            ));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            problems.push(crate::problem::Violation::new(
                "times",
                "comparison times must increase",
            ));
        }
        if !(self.margins.front >= 0.0 && self.margins.right >= 0.0) {
            problems.push(crate::problem::Violation::new("margins", "margins must be nonnegative"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        self.solver.check()?;
        match &self.problem {
            ExperimentSource::Transport { spec } => Ok(spec.validate()?.warnings),
            ExperimentSource::Microdevice { spec } => spec.validate(),
            ExperimentSource::Oscillatory { spec, samples, .. } => {
                spec.check()?;
                if *samples < 2 {
                    return Err(Error::domain("samples", *samples as f64, "[2, inf)"));
                }
                Ok(Vec::new())
            }
        }
    }

    /// The outer solution this experiment compares against.
    pub fn analytic(&self) -> Result<CharacteristicSolution> {
        match &self.problem {
            ExperimentSource::Transport { spec } => CharacteristicSolution::new(spec.clone()),
            ExperimentSource::Microdevice { spec } => spec.characteristics(),
            ExperimentSource::Oscillatory { .. } => Err(Error::UnsupportedRegime(
                "oscillatory experiments have no spatial profile".into(),
            )),
        }
    }

    /// Runs the reference solver at the comparison times.
    pub fn solve(&self) -> Result<GridSolution> {
        let times = self.comparison_times();
        match &self.problem {
            ExperimentSource::Transport { spec } => solve_cell_pde(spec, &self.solver, &times),
            ExperimentSource::Microdevice { spec } => solve_coupled(spec, &self.solver, &times),
            ExperimentSource::Oscillatory { .. } => Err(Error::UnsupportedRegime(
                "oscillatory experiments have no spatial profile".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeReport {
    pub t: f64,
    /// x*(t), clamped to the domain.
    pub front_analytic: f64,
    pub front_numeric: Option<f64>,
    pub front_error: Option<f64>,
    pub front_tolerance: f64,
    /// [lo, hi], or None when the margins leave nothing.
    pub window: Option<[f64; 2]>,
    /// Largest analytic density in the window.
    pub plateau: Option<f64>,
    /// Sup error over the window relative to the plateau.
    pub sup_error: Option<f64>,
    /// RMS error over the window relative to the plateau.
    pub l2_error: Option<f64>,
    /// 10–90 % rise width of the numeric front.
    pub layer_width: Option<f64>,
    /// Same width for the erf layer.
    pub layer_width_expected: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeError {
    pub regime: oscillatory::Regime,
    pub score: f64,
    pub sup_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub x: f64,
    pub u_num: f64,
    pub u_an: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub experiment: String,
    pub times: Vec<TimeReport>,
    pub regime: Option<RegimeError>,
    pub passed: bool,
    pub failure: Option<String>,
    /// Full-domain profiles at each comparison time.
    #[serde(skip)]
    pub profiles: Vec<ProfileRow>,
    /// Analytic front trajectory (t, x*) up to the last comparison time.
    #[serde(skip)]
    pub trajectory: Vec<[f64; 2]>,
}

impl ErrorReport {
    fn failed(name: &str, e: &Error) -> Self {
        ErrorReport {
            experiment: name.to_string(),
            times: Vec::new(),
            regime: None,
            passed: false,
            failure: Some(e.to_string()),
            profiles: Vec::new(),
            trajectory: Vec::new(),
        }
    }

    pub fn window_empty(&self) -> bool {
        self.times.iter().any(|r| r.window.is_none())
    }
}

/// Solves, compares and never panics: failures land in the report.
pub fn run_compare(cfg: &ExperimentConfig) -> ErrorReport {
    let result = match &cfg.problem {
        ExperimentSource::Oscillatory {
            spec,
            regime,
            t_max,
            samples,
        } => compare_oscillatory(&cfg.name, spec, *regime, *t_max, *samples),
        _ => cfg.solve().and_then(|sol| compare_solution(cfg, &sol)),
    };
    result.unwrap_or_else(|e| ErrorReport::failed(&cfg.name, &e))
}

fn compare_oscillatory(
    name: &str,
    spec: &OscillatorySpec,
    regime: Option<oscillatory::Regime>,
    t_max: f64,
    samples: usize,
) -> Result<ErrorReport> {
    let (selected, score) = spec.regime_select();
    let regime = regime.unwrap_or(selected);
    let sup_error = spec.sup_error(regime, t_max, samples)?;
    Ok(ErrorReport {
        experiment: name.to_string(),
        times: Vec::new(),
        regime: Some(RegimeError {
            regime,
            score,
            sup_error,
        }),
        passed: true,
        failure: None,
        profiles: Vec::new(),
        trajectory: Vec::new(),
    })
}

/// Compares a numeric solution (one snapshot per comparison time) with the
/// composite analytic solution.
pub fn compare_solution(cfg: &ExperimentConfig, sol: &GridSolution) -> Result<ErrorReport> {
    let outer = cfg.analytic()?;
    let d = outer.spec().diffusion;
    let length = outer.spec().domain.length;
    let composite = CompositeSolution::new(outer, d);
    let centers = sol.grid.centers();
    let h = sol.grid.h();
    let mut times = Vec::new();
    let mut profiles = Vec::new();

    for (k, &t) in sol.times.iter().enumerate() {
        let width = (d * t).sqrt();
        let front = composite.outer().front_position(t)?.clamp(0.0, length);
        let u_an = composite.profile(t, &centers)?;
        let u_num = &sol.u[k];
        profiles.extend(centers.iter().zip(u_num).zip(&u_an).map(|((&x, &n), &a)| ProfileRow {
            t,
            x,
            u_num: n,
            u_an: a,
        }));

        let lo = front + cfg.margins.front * width;
        let hi = length - cfg.margins.right;
        let front_numeric = sol.front_at(k, lo);
        let front_tolerance = cfg.tolerances.front * width;
        let front_error = front_numeric.map(|x| (x - front).abs());

        let inside: Vec<usize> = (0..centers.len())
            .filter(|&i| centers[i] >= lo && centers[i] <= hi)
            .collect();
        let (window, plateau, sup_error, l2_error) = if inside.is_empty() {
            (None, None, None, None)
        } else {
            let plateau = inside.iter().map(|&i| u_an[i].abs()).fold(0.0, f64::max);
            let sup = inside.iter().map(|&i| (u_num[i] - u_an[i]).abs()).fold(0.0, f64::max);
            let ss: f64 = inside.iter().map(|&i| (u_num[i] - u_an[i]).powi(2)).sum::<f64>() * h;
            let span = inside.len() as f64 * h;
            (
                Some([lo, hi]),
                Some(plateau),
                Some(sup / plateau),
                Some((ss / span).sqrt() / plateau),
            )
        };

        let star = composite.outer().density_on_label(t, 0.0)?;
        let layer_width = match (sol.first_crossing(k, 0.1 * star), sol.first_crossing(k, 0.9 * star)) {
            (Some(a), Some(b)) if b > a => Some(b - a),
            _ => None,
        };

        let front_ok = front_error.is_some_and(|e| e <= front_tolerance);
        let density_ok = sup_error.is_none_or(|e| e <= cfg.tolerances.density);
        times.push(TimeReport {
            t,
            front_analytic: front,
            front_numeric,
            front_error,
            front_tolerance,
            window,
            plateau,
            sup_error,
            l2_error,
            layer_width,
            layer_width_expected: ERF_10_90_WIDTH * width,
            passed: front_ok && density_ok,
        });
    }
    let t_last = sol.times.last().copied().unwrap_or(0.0);
    let trajectory = if t_last > 0.0 {
        let ts: Vec<f64> = (1..=TRAJECTORY_SAMPLES)
            .map(|i| t_last * i as f64 / TRAJECTORY_SAMPLES as f64)
            .collect();
        let tr = composite.outer().front_trajectory(&ts)?;
        tr.times.iter().zip(&tr.positions).map(|(&t, &x)| [t, x]).collect()
    } else {
        Vec::new()
    };
    let passed = times.iter().all(|r| r.passed);
    Ok(ErrorReport {
        experiment: cfg.name.clone(),
        times,
        regime: None,
        passed,
        failure: None,
        profiles,
        trajectory,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::field::{ChemotaxisField, GrowthField, InitialProfile};
    use crate::pde::Grid;
    use crate::problem::SpatialDomain;
    use crate::signal::TimeSignal;

    pub(crate) fn linear_config(cells: usize) -> ExperimentConfig {
        ExperimentConfig {
            name: "linear".into(),
            problem: ExperimentSource::Transport {
                spec: ProblemSpec {
                    domain: SpatialDomain { length: 1.0, cells },
                    diffusion: 1e-3,
                    alpha: ChemotaxisField::linear(TimeSignal::constant(2.0), TimeSignal::constant(1.0)),
                    beta: GrowthField::constant(1.0),
                    u0: InitialProfile::uniform(0.05),
                    t_end: 0.4,
                },
            },
            solver: SolverConfig::default(),
            times: vec![0.2, 0.4],
            margins: Margins::default(),
            tolerances: Tolerances::default(),
        }
    }

    #[test]
    fn erf_width_constant() {
        let tau: f64 = 1.0;
        let f = |p: f64| {
            crate::numerics::bisect(|x| crate::layer::inner_profile(x, tau).unwrap() - p, -10.0, 10.0, 1e-15).unwrap()
        };
        assert!((f(0.9) - f(0.1) - ERF_10_90_WIDTH).abs() < 1e-12);
    }

    #[test]
    fn analytic_against_itself_is_exact() {
        let cfg = linear_config(256);
        let outer = cfg.analytic().unwrap();
        let composite = CompositeSolution::from_outer(outer);
        let grid = Grid::new(256, 1.0);
        let times = cfg.comparison_times();
        let u = times
            .iter()
            .map(|&t| composite.profile(t, &grid.centers()).unwrap())
            .collect();
        let sol = GridSolution::from_snapshots(grid, times, u);
        let r = compare_solution(&cfg, &sol).unwrap();
        assert!(r.passed);
        for tr in &r.times {
            assert_eq!(tr.sup_error, Some(0.0));
            assert_eq!(tr.l2_error, Some(0.0));
            assert!(tr.front_error.unwrap() < 1e-2 * tr.front_tolerance);
        }
        assert!(r.profiles.iter().all(|p| p.u_num == p.u_an));
    }

    #[test]
    fn linear_preset_passes() {
        let r = run_compare(&linear_config(512));
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.times.len(), 2);
        assert_eq!(r.profiles.len(), 2 * 512);
    }

    #[test]
    fn empty_window_is_flagged() {
        let mut cfg = linear_config(128);
        cfg.margins.right = 0.99;
        cfg.times = vec![0.05];
        let r = run_compare(&cfg);
        assert!(r.failure.is_none());
        assert!(r.window_empty());
        assert!(r.times[0].sup_error.is_none());
    }

    #[test]
    fn failures_become_reports() {
        let mut cfg = linear_config(128);
        cfg.solver.cfl = 2.0;
        let r = run_compare(&cfg);
        assert!(!r.passed);
        assert!(r.failure.unwrap().contains("cfl"));
    }

    #[test]
    fn config_validation() {
        let mut cfg = linear_config(128);
        cfg.times = vec![0.3, 0.9];
        assert!(cfg.validate().unwrap_err().is_validation());
        let json = serde_json::to_string(&linear_config(128)).unwrap();
        let back = ExperimentConfig::from_json(&json).unwrap();
        assert_eq!(back, linear_config(128));
    }

    #[test]
    fn oscillatory_experiment_reports_regime_error() {
        let cfg = ExperimentConfig {
            name: "slow".into(),
            problem: ExperimentSource::Oscillatory {
                spec: OscillatorySpec::new(2.0, 3.0, 0.1, 20.0).unwrap(),
                regime: None,
                t_max: 10.0,
                samples: 201,
            },
            solver: SolverConfig::default(),
            times: Vec::new(),
            margins: Margins::default(),
            tolerances: Tolerances::default(),
        };
        let r = run_compare(&cfg);
        let re = r.regime.unwrap();
        assert_eq!(re.regime, oscillatory::Regime::Slow);
        assert!(re.sup_error > 0.0 && re.sup_error < 1.0);
    }
}
