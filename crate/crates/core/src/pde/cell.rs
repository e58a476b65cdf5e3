//! Finite-volume solver for u_t + (αu)_x = D u_xx + β u(1 − u) with zero
//! flux at both ends.

use serde::{Deserialize, Serialize};

use super::grid::{Grid, GridSolution};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Three-stage strong-stability-preserving Runge–Kutta at a fixed CFL.
    #[default]
    SspRk3,
    /// Bogacki–Shampine 3(2) with error control, capped by the CFL step.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    /// First-order upwind.
    None,
    #[default]
    Minmod,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Overrides the cell count of the problem's domain.
    pub cells: Option<usize>,
    pub cfl: f64,
    pub integrator: Integrator,
    pub limiter: Limiter,
    /// Relative tolerance of the adaptive integrator.
    pub rtol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cells: None,
            cfl: 0.4,
            integrator: Integrator::SspRk3,
            limiter: Limiter::Minmod,
            rtol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn with_cells(cells: usize) -> Self {
        SolverConfig {
            cells: Some(cells),
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::domain("cfl", self.cfl, "(0, 1)"));
        }
        if let Some(n) = self.cells {
            if n < 8 {
                return Err(Error::domain("cells", n as f64, "[8, inf)"));
            }
        }
        if !(self.rtol > 0.0) {
            return Err(Error::domain("rtol", self.rtol, "(0, inf)"));
        }
        Ok(())
    }
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Semi-discrete right-hand side. `vel` holds α at the N + 1 faces (the two
/// boundary entries are ignored), `growth` holds β at the N centres.
pub(crate) struct Operator {
    pub h: f64,
    pub diffusion: f64,
    pub limiter: Limiter,
    slopes: Vec<f64>,
}

impl Operator {
    pub fn new(h: f64, diffusion: f64, limiter: Limiter, cells: usize) -> Self {
        Operator {
            h,
            diffusion,
            limiter,
            slopes: vec![0.0; cells],
        }
    }

    pub fn apply(&mut self, u: &[f64], vel: &[f64], growth: &[f64], out: &mut [f64]) {
        let n = u.len();
        if self.limiter == Limiter::Minmod {
            self.slopes[0] = 0.0;
            self.slopes[n - 1] = 0.0;
            for i in 1..n - 1 {
                self.slopes[i] = minmod(u[i] - u[i - 1], u[i + 1] - u[i]);
            }
        }
        let (h, d) = (self.h, self.diffusion);
        let mut left_flux = 0.0;
        for i in 0..n {
            let right_flux = if i + 1 == n {
                0.0
            } else {
                let a = vel[i + 1];
                let up = if a >= 0.0 {
                    u[i] + 0.5 * self.slope(i)
                } else {
                    u[i + 1] - 0.5 * self.slope(i + 1)
                };
                a * up - d * (u[i + 1] - u[i]) / h
            };
            out[i] = -(right_flux - left_flux) / h + growth[i] * u[i] * (1.0 - u[i]);
            left_flux = right_flux;
        }
    }

    fn slope(&self, i: usize) -> f64 {
        match self.limiter {
            Limiter::None => 0.0,
            Limiter::Minmod => self.slopes[i],
        }
    }

    /// Largest stable explicit step for the given coefficients.
    pub fn stable_dt(&self, cfl: f64, vel: &[f64], growth: &[f64]) -> f64 {
        let amax = vel.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let bmax = growth.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        let rate = amax / self.h + 2.0 * self.diffusion / (self.h * self.h) + bmax;
        if rate > 0.0 {
            cfl / rate
        } else {
            f64::INFINITY
        }
    }
}

/// Scratch space and step counters shared by the fixed and adaptive steppers.
pub(crate) struct Stepper {
    pub op: Operator,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
}

impl Stepper {
    pub fn new(op: Operator, cells: usize) -> Self {
        Stepper {
            op,
            k1: vec![0.0; cells],
            k2: vec![0.0; cells],
            k3: vec![0.0; cells],
            k4: vec![0.0; cells],
            stage: vec![0.0; cells],
            steps: 0,
            rejected: 0,
        }
    }

    /// One SSP-RK3 step with coefficients from `coeffs(t, vel, growth)`.
    pub fn ssp_rk3<C>(&mut self, u: &mut [f64], t: f64, dt: f64, coeffs: &mut C, vel: &mut [f64], growth: &mut [f64])
    where
        C: FnMut(f64, &mut [f64], &mut [f64]),
    {
        let n = u.len();
        coeffs(t, vel, growth);
        self.op.apply(u, vel, growth, &mut self.k1);
        for i in 0..n {
            self.stage[i] = u[i] + dt * self.k1[i];
        }
        coeffs(t + dt, vel, growth);
        self.op.apply(&self.stage, vel, growth, &mut self.k1);
        for i in 0..n {
            self.stage[i] = 0.75 * u[i] + 0.25 * (self.stage[i] + dt * self.k1[i]);
        }
        coeffs(t + 0.5 * dt, vel, growth);
        self.op.apply(&self.stage, vel, growth, &mut self.k1);
        for i in 0..n {
            u[i] = u[i] / 3.0 + 2.0 / 3.0 * (self.stage[i] + dt * self.k1[i]);
        }
        self.steps += 1;
    }

    /// One Bogacki–Shampine attempt; on success advances `u` and returns the
    /// scaled error norm, otherwise leaves `u` untouched.
    pub fn bs32<C>(
        &mut self,
        u: &mut [f64],
        t: f64,
        dt: f64,
        rtol: f64,
        coeffs: &mut C,
        vel: &mut [f64],
        growth: &mut [f64],
    ) -> f64
    where
        C: FnMut(f64, &mut [f64], &mut [f64]),
    {
        let n = u.len();
        coeffs(t, vel, growth);
        self.op.apply(u, vel, growth, &mut self.k1);
        for i in 0..n {
            self.stage[i] = u[i] + 0.5 * dt * self.k1[i];
        }
        coeffs(t + 0.5 * dt, vel, growth);
        self.op.apply(&self.stage, vel, growth, &mut self.k2);
        for i in 0..n {
            self.stage[i] = u[i] + 0.75 * dt * self.k2[i];
        }
        coeffs(t + 0.75 * dt, vel, growth);
        self.op.apply(&self.stage, vel, growth, &mut self.k3);
        for i in 0..n {
            self.stage[i] = u[i] + dt * (2.0 * self.k1[i] + 3.0 * self.k2[i] + 4.0 * self.k3[i]) / 9.0;
        }
        coeffs(t + dt, vel, growth);
        self.op.apply(&self.stage, vel, growth, &mut self.k4);
        let atol = 1e-3 * rtol;
        let mut err = 0.0f64;
        for i in 0..n {
            let e = dt
                * (-5.0 / 72.0 * self.k1[i] + 1.0 / 12.0 * self.k2[i] + 1.0 / 9.0 * self.k3[i]
                    - 1.0 / 8.0 * self.k4[i]);
            let sc = atol + rtol * u[i].abs().max(self.stage[i].abs());
            let r = (e / sc).abs();
            err = if r.is_nan() { f64::INFINITY } else { err.max(r) };
        }
        if err <= 1.0 {
            u.copy_from_slice(&self.stage);
            self.steps += 1;
        } else {
            self.rejected += 1;
        }
        err
    }
}

fn output_times(times: &[f64], t_end: f64) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Ok(vec![t_end]);
    }
    for w in times.windows(2) {
        if !(w[1] >= w[0]) {
            return Err(Error::Config("output times must be nondecreasing".into()));
        }
    }
    if times[0] < 0.0 {
        return Err(Error::domain("t", times[0], "[0, t_end]"));
    }
    Ok(times.to_vec())
}

fn non_finite(sol: &GridSolution, t: f64, steps: usize, last: &[f64], last_t: f64) -> Error {
    let mut good = sol.clone();
    good.record(last_t, last, None);
    Error::NonFinite {
        t,
        steps,
        last_good: Box::new(good),
    }
}

/// Solves the transport problem on the configured grid and records the cell
/// averages at each of `times` (or at `t_end` when `times` is empty).
pub fn solve_cell_pde(spec: &ProblemSpec, cfg: &SolverConfig, times: &[f64]) -> Result<GridSolution> {
    spec.validate()?;
    cfg.check()?;
    let times = output_times(times, spec.t_end)?;
    let grid = Grid::new(cfg.cells.unwrap_or(spec.domain.cells), spec.domain.length);
    let faces = grid.faces();
    let centers = grid.centers();
    let mut u: Vec<f64> = centers.iter().map(|&x| spec.u0.value(x)).collect();

    let mut coeffs = |t: f64, vel: &mut [f64], growth: &mut [f64]| {
        for (v, &x) in vel.iter_mut().zip(&faces) {
            *v = spec.alpha.value(t, x);
        }
        for (g, &x) in growth.iter_mut().zip(&centers) {
            *g = spec.beta.value(t, x);
        }
    };
    let n = grid.cells;
    let op = Operator::new(grid.h(), spec.diffusion, cfg.limiter, n);
    let mut stepper = Stepper::new(op, n);
    let mut vel = vec![0.0; n + 1];
    let mut growth = vec![0.0; n];
    let mut sol = GridSolution::new(grid, false);
    let mut last = u.clone();
    let mut t = 0.0;
    let mut dt_try = f64::INFINITY;

    for &target in &times {
        while t < target {
            coeffs(t, &mut vel, &mut growth);
            let dt_cfl = stepper.op.stable_dt(cfg.cfl, &vel, &growth);
            let remaining = target - t;
            let mut dt = dt_cfl.min(dt_try).min(remaining);
            if remaining - dt < 1e-12 * dt_cfl.min(remaining) {
                dt = remaining;
            }
            if dt < 1e-14 * (1.0 + t) {
                return Err(Error::StepUnderflow { t, dt });
            }
            last.copy_from_slice(&u);
            match cfg.integrator {
                Integrator::SspRk3 => stepper.ssp_rk3(&mut u, t, dt, &mut coeffs, &mut vel, &mut growth),
                Integrator::Adaptive => {
                    let err = stepper.bs32(&mut u, t, dt, cfg.rtol, &mut coeffs, &mut vel, &mut growth);
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-1.0 / 3.0)).clamp(0.2, 5.0)
                    };
                    dt_try = dt * factor;
                    if err > 1.0 {
                        continue;
                    }
                }
            }
            let t_new = if dt == remaining { target } else { t + dt };
            if u.iter().any(|x| !x.is_finite()) {
                sol.diagnostics.steps = stepper.steps;
                sol.diagnostics.rejected = stepper.rejected;
                return Err(non_finite(&sol, t_new, stepper.steps, &last, t));
            }
            t = t_new;
        }
        sol.record(t, &u, None);
    }
    sol.diagnostics.steps = stepper.steps;
    sol.diagnostics.rejected = stepper.rejected;
    Ok(sol)
}
