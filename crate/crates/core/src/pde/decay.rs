//! Relaxation of the chemoattractant towards its outer profile:
//! v_t = Π₃v_xx − μΠ₃λv^ζ with fixed wall values. Each sine mode of the
//! departure from steady state decays at (n²π² + μζλ)Π₃.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{linear_fit, tridiag};
use crate::signal::interp_linear;

/// Mode amplitudes below this cannot be fitted.
pub const AMPLITUDE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCase {
    /// Uptake switch μ ∈ {0, 1}.
    pub mu: u8,
    /// Uptake exponent ζ ∈ {0, 1}.
    pub zeta: u8,
    pub pi3: f64,
    pub lambda: f64,
    #[serde(default)]
    pub left: f64,
    #[serde(default = "one")]
    pub right: f64,
    #[serde(default = "default_nodes")]
    pub intervals: usize,
}

fn one() -> f64 {
    1.0
}

fn default_nodes() -> usize {
    128
}

impl DecayCase {
    pub fn new(mu: u8, zeta: u8, pi3: f64, lambda: f64) -> Self {
        DecayCase {
            mu,
            zeta,
            pi3,
            lambda,
            left: 0.0,
            right: 1.0,
            intervals: default_nodes(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.mu > 1 {
            return Err(Error::domain("mu", self.mu as f64, "{0, 1}"));
        }
        if self.zeta > 1 {
            return Err(Error::domain("zeta", self.zeta as f64, "{0, 1}"));
        }
        if !(self.pi3 > 0.0) {
            return Err(Error::domain("pi3", self.pi3, "(0, inf)"));
        }
        if self.intervals < 8 {
            return Err(Error::domain("intervals", self.intervals as f64, "[8, inf)"));
        }
        Ok(())
    }

    /// Theoretical decay rate of mode n in t-units.
    pub fn expected_rate(&self, n: usize) -> f64 {
        let uptake = if self.mu == 1 && self.zeta == 1 {
            self.lambda
        } else {
            0.0
        };
        ((n * n) as f64 * std::f64::consts::PI.powi(2) + uptake) * self.pi3
    }

    /// (linear coefficient, constant sink) of the uptake term, per unit Π₃.
    fn sink(&self) -> (f64, f64) {
        match (self.mu, self.zeta) {
            (0, _) => (0.0, 0.0),
            (_, 0) => (0.0, self.lambda),
            _ => (self.lambda, 0.0),
        }
    }

    fn nodes(&self) -> Vec<f64> {
        let m = self.intervals;
        (0..=m).map(|j| j as f64 / m as f64).collect()
    }

    /// Discrete steady state with the case's wall values.
    pub fn steady_state(&self) -> Vec<f64> {
        let m = self.intervals;
        let h = 1.0 / m as f64;
        let (lin, con) = self.sink();
        let k = m - 1;
        let lower = vec![-1.0; k];
        let diag = vec![2.0 + lin * h * h; k];
        let upper = vec![-1.0; k];
        let mut rhs = vec![-con * h * h; k];
        rhs[0] += self.left;
        rhs[k - 1] += self.right;
        tridiag::solve(&lower, &diag, &upper, &mut rhs);
        let mut v = Vec::with_capacity(m + 1);
        v.push(self.left);
        v.extend(rhs);
        v.push(self.right);
        v
    }
}

/// Initial chemoattractant for a decay run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecayInit {
    /// Exactly the discrete steady state: no transient.
    Outer,
    /// Steady state plus Σ q_n sin(nπx), given as (n, q_n) pairs.
    Modes { modes: Vec<(usize, f64)> },
    /// Piecewise-linear table; the end values should match the walls.
    Sampled { knots: Vec<f64>, values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeFit {
    pub mode: usize,
    pub fitted_rate: f64,
    pub expected_rate: f64,
    pub relative_error: f64,
    pub initial_amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub case: DecayCase,
    pub fits: Vec<ModeFit>,
}

impl DecayReport {
    pub fn worst_relative_error(&self) -> f64 {
        self.fits.iter().map(|f| f.relative_error).fold(0.0, f64::max)
    }
}

/// Sine-mode amplitudes q_n(t) = 2∫(v − v_ss) sin(nπx) dx for each mode at
/// each of `times` (increasing, from t = 0), by Crank–Nicolson.
pub fn mode_history(case: &DecayCase, init: &DecayInit, modes: &[usize], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    case.check()?;
    let m = case.intervals;
    let h = 1.0 / m as f64;
    let x = case.nodes();
    let steady = case.steady_state();
    let mut v: Vec<f64> = match init {
        DecayInit::Outer => steady.clone(),
        DecayInit::Modes { modes } => x
            .iter()
            .zip(&steady)
            .map(|(&xj, &s)| {
                s + modes
                    .iter()
                    .map(|&(n, q)| q * (n as f64 * std::f64::consts::PI * xj).sin())
                    .sum::<f64>()
            })
            .collect(),
        DecayInit::Sampled { knots, values } => x.iter().map(|&xj| interp_linear(knots, values, xj)).collect(),
    };
    v[0] = case.left;
    v[m] = case.right;

    let slowest = case.expected_rate(1);
    let dt_max = 0.01 / slowest;
    let (lin, con) = case.sink();
    let p = case.pi3;
    let project = |v: &[f64]| -> Vec<f64> {
        modes
            .iter()
            .map(|&n| {
                let w = n as f64 * std::f64::consts::PI;
                2.0 * h * (1..m).map(|j| (v[j] - steady[j]) * (w * x[j]).sin()).sum::<f64>()
            })
            .collect()
    };

    let k = m - 1;
    let (mut lower, mut diag, mut upper, mut rhs) = (vec![0.0; k], vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    for &target in times {
        if target < t {
            return Err(Error::Config("decay sample times must be increasing".into()));
        }
        let steps = ((target - t) / dt_max).ceil() as usize;
        if steps > 0 {
            let dt = (target - t) / steps as f64;
            let r = 0.5 * p * dt / (h * h);
            let a = 0.5 * p * lin * dt;
            for _ in 0..steps {
                for i in 0..k {
                    let j = i + 1;
                    lower[i] = -r;
                    diag[i] = 1.0 + 2.0 * r + a;
                    upper[i] = -r;
                    rhs[i] = v[j] + r * (v[j - 1] - 2.0 * v[j] + v[j + 1]) - a * v[j] - p * con * dt;
                }
                rhs[0] += r * case.left;
                rhs[k - 1] += r * case.right;
                tridiag::solve(&lower, &diag, &upper, &mut rhs);
                v[1..m].copy_from_slice(&rhs);
            }
        }
        t = target;
        out.push(project(&v));
    }
    Ok(out)
}

/// Fits the decay rate of each requested mode by log-linear regression over
/// a window of six e-folds of the slowest of them.
pub fn transient_decay_check(case: &DecayCase, init: &DecayInit, modes: &[usize]) -> Result<DecayReport> {
    let n_min = modes.iter().copied().min().unwrap_or(1).max(1);
    let window = 6.0 / case.expected_rate(n_min);
    let samples = 121;
    let times: Vec<f64> = (0..samples).map(|i| window * i as f64 / (samples - 1) as f64).collect();
    let history = mode_history(case, init, modes, &times)?;
    let mut fits = Vec::with_capacity(modes.len());
    for (col, &mode) in modes.iter().enumerate() {
        let (ts, logs): (Vec<f64>, Vec<f64>) = times
            .iter()
            .zip(&history)
            .filter(|(_, q)| q[col].abs() > 1e3 * AMPLITUDE_FLOOR)
            .map(|(&t, q)| (t, q[col].abs().ln()))
            .unzip();
        if ts.len() < 3 || history[0][col].abs() < AMPLITUDE_FLOOR {
            return Err(Error::FitFailure {
                mode,
                floor: AMPLITUDE_FLOOR,
            });
        }
        let (slope, _) = linear_fit(&ts, &logs);
        let fitted = -slope;
        let expected = case.expected_rate(mode);
        fits.push(ModeFit {
            mode,
            fitted_rate: fitted,
            expected_rate: expected,
            relative_error: ((fitted - expected) / expected).abs(),
            initial_amplitude: history[0][col],
        });
    }
    Ok(DecayReport { case: *case, fits })
}
