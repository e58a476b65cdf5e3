//! Cells coupled to a diffusing chemoattractant:
//!
//! u_t = Π₁u_xx − Π₂(v_x u)_x + m(v)u(1 − u),  v_t = Π₃(v_xx − w(v)),
//!
//! with w = 0, λ or λv by regime. v lives on the cell faces (grid nodes) and
//! takes its wall values from the regime's outer profile; the symmetric
//! chamber has no flux at x = 0 instead.

use super::cell::{Integrator, Operator, SolverConfig, Stepper};
use super::grid::{Grid, GridSolution};
use crate::error::{Error, Result};
use crate::microdevice::{MicrodeviceSpec, Regime};
use crate::numerics::tridiag;

/// Implicit chemoattractant steps are capped at this fraction of the slowest
/// relaxation time 1/(π²Π₃).
const RELAXATION_FRACTION: f64 = 0.1;

struct AgentStepper {
    h: f64,
    pi3: f64,
    lambda: f64,
    regime: Regime,
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
}

impl AgentStepper {
    fn new(md: &MicrodeviceSpec, h: f64, nodes: usize) -> Self {
        AgentStepper {
            h,
            pi3: md.pi3,
            lambda: md.lambda,
            regime: md.regime,
            lower: vec![0.0; nodes],
            diag: vec![0.0; nodes],
            upper: vec![0.0; nodes],
            rhs: vec![0.0; nodes],
        }
    }

    /// Backward Euler from t to t + dt, with wall values at t + dt.
    fn step(&mut self, v: &mut [f64], dt: f64, left: f64, right: f64) {
        let n = v.len() - 1;
        let r = self.pi3 * dt / (self.h * self.h);
        let (linear_sink, constant_sink) = match self.regime {
            Regime::WeakConsumption => (0.0, 0.0),
            Regime::HighNutrient => (0.0, self.pi3 * self.lambda * dt),
            Regime::LowNutrientGradient | Regime::LowNutrientSymmetric => (self.pi3 * self.lambda * dt, 0.0),
        };
        let neumann = self.regime == Regime::LowNutrientSymmetric;
        let first = if neumann { 0 } else { 1 };
        let m = n - first;
        let (lo, di, up, rhs) = (
            &mut self.lower[..m],
            &mut self.diag[..m],
            &mut self.upper[..m],
            &mut self.rhs[..m],
        );
        for k in 0..m {
            let j = k + first;
            lo[k] = -r;
            di[k] = 1.0 + 2.0 * r + linear_sink;
            up[k] = -r;
            rhs[k] = v[j] - constant_sink;
        }
        if neumann {
            up[0] = -2.0 * r;
        } else {
            rhs[0] += r * left;
        }
        rhs[m - 1] += r * right;
        tridiag::solve(lo, di, up, rhs);
        v[first..n].copy_from_slice(rhs);
        if !neumann {
            v[0] = left;
        }
        v[n] = right;
    }
}

/// Coupled solve starting from the outer chemoattractant profile.
pub fn solve_coupled(md: &MicrodeviceSpec, cfg: &SolverConfig, times: &[f64]) -> Result<GridSolution> {
    let profile = md.profile();
    solve_coupled_from(md, cfg, times, |x| profile.value(0.0, x))
}

/// Coupled solve with an explicit initial chemoattractant profile `v0`.
pub fn solve_coupled_from<F>(md: &MicrodeviceSpec, cfg: &SolverConfig, times: &[f64], v0: F) -> Result<GridSolution>
where
    F: Fn(f64) -> f64,
{
    md.validate()?;
    cfg.check()?;
    let times = if times.is_empty() {
        vec![md.t_end]
    } else {
        times.to_vec()
    };
    if times.windows(2).any(|w| !(w[1] >= w[0])) || times[0] < 0.0 {
        return Err(Error::Config(
            "output times must be nondecreasing and nonnegative".into(),
        ));
    }
    let grid = Grid::new(cfg.cells.unwrap_or(md.cells), 1.0);
    let n = grid.cells;
    let h = grid.h();
    let profile = md.profile();
    let mut v: Vec<f64> = grid.faces().iter().map(|&x| v0(x)).collect();
    let mut u: Vec<f64> = grid.centers().iter().map(|&x| md.u0.value(x)).collect();

    let mut agent = AgentStepper::new(md, h, n + 1);
    let mut stepper = Stepper::new(Operator::new(h, md.pi1, cfg.limiter, n), n);
    let dt_agent = RELAXATION_FRACTION / (std::f64::consts::PI.powi(2) * md.pi3);
    let mut vel = vec![0.0; n + 1];
    let mut growth = vec![0.0; n];
    let coefficients = |v: &[f64], vel: &mut [f64], growth: &mut [f64]| {
        for j in 1..n {
            vel[j] = md.pi2 * (v[j + 1] - v[j - 1]) / (2.0 * h);
        }
        for i in 0..n {
            growth[i] = md.m.eval(0.5 * (v[i] + v[i + 1]));
        }
    };

    let mut sol = GridSolution::new(grid, true);
    let mut t = 0.0;
    let mut dt_try = f64::INFINITY;
    let mut last = u.clone();
    for &target in &times {
        while t < target {
            coefficients(&v, &mut vel, &mut growth);
            let remaining = target - t;
            let dt_cfl = stepper.op.stable_dt(cfg.cfl, &vel, &growth);
            let mut dt = dt_cfl.min(remaining);
            if remaining - dt < 1e-12 * dt_cfl.min(remaining) {
                dt = remaining;
            }
            if dt < 1e-14 * (1.0 + t) {
                return Err(Error::StepUnderflow { t, dt });
            }
            let t_new = if dt == remaining { target } else { t + dt };

            let sub = (dt / dt_agent).ceil().max(1.0) as usize;
            let dts = dt / sub as f64;
            for k in 1..=sub {
                let tk = if k == sub { t_new } else { t + k as f64 * dts };
                agent.step(&mut v, dts, profile.value(tk, 0.0), profile.value(tk, 1.0));
            }

            coefficients(&v, &mut vel, &mut growth);
            let mut frozen = |_: f64, a: &mut [f64], b: &mut [f64]| {
                a.copy_from_slice(&vel);
                b.copy_from_slice(&growth);
            };
            let (mut va, mut ga) = (vel.clone(), growth.clone());
            last.copy_from_slice(&u);
            match cfg.integrator {
                Integrator::SspRk3 => stepper.ssp_rk3(&mut u, t, dt, &mut frozen, &mut va, &mut ga),
                Integrator::Adaptive => {
                    let mut s = 0.0;
                    while s < dt {
                        let d = dt_try.min(dt - s);
                        if d < 1e-14 * (1.0 + t) {
                            return Err(Error::StepUnderflow { t: t + s, dt: d });
                        }
                        let err = stepper.bs32(&mut u, t + s, d, cfg.rtol, &mut frozen, &mut va, &mut ga);
                        let factor = if err == 0.0 {
                            5.0
                        } else {
                            (0.9 * err.powf(-1.0 / 3.0)).clamp(0.2, 5.0)
                        };
                        if err <= 1.0 {
                            s = if dt - s - d <= 1e-12 * dt { dt } else { s + d };
                        }
                        dt_try = d * factor;
                    }
                }
            }
            if u.iter().chain(&v).any(|x| !x.is_finite()) {
                let mut good = sol.clone();
                good.diagnostics.steps = stepper.steps;
                good.record(t, &last, None);
                return Err(Error::NonFinite {
                    t: t_new,
                    steps: stepper.steps,
                    last_good: Box::new(good),
                });
            }
            t = t_new;
        }
        sol.record(t, &u, Some(&v));
    }
    sol.diagnostics.steps = stepper.steps;
    sol.diagnostics.rejected = stepper.rejected;
    Ok(sol)
}
