//! Outer (diffusion-free) solution by the method of characteristics.
//!
//! Labels s are initial positions: the characteristic through (0, s) sits at
//! F(t; s) at time t, and G(t; ·) is its inverse. The characteristic from
//! s = 0 separates the empty region from the populated one; its position is
//! the front x*(t).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ChemotaxisField, Family, SpaceFn};
use crate::numerics::{bisect, ode, quad};
use crate::problem::ProblemSpec;
use crate::signal::TimeSignal;

/// Tolerances for the numeric fallback and for integrals along characteristics.
const FALLBACK_RTOL: f64 = 1e-11;
const FALLBACK_ATOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct CharacteristicSolution {
    spec: ProblemSpec,
    family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontTrajectory {
    pub times: Vec<f64>,
    /// x*(t), with excursions behind x = 0 reported as 0.
    pub positions: Vec<f64>,
    /// First time the front reaches x = L, if it does within the samples.
    pub exit_time: Option<f64>,
}

impl FrontTrajectory {
    /// Linear interpolation between samples, held at the ends.
    pub fn at(&self, t: f64) -> f64 {
        crate::signal::interp_linear(&self.times, &self.positions, t)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,x_star\n");
        for (t, x) in self.times.iter().zip(&self.positions) {
            s.push_str(&format!("{t},{x}\n"));
        }
        s
    }
}

impl CharacteristicSolution {
    /// Validates the spec and selects the closed-form family if there is one.
    pub fn new(spec: ProblemSpec) -> Result<Self> {
        let report = spec.validate()?;
        Ok(CharacteristicSolution {
            spec,
            family: report.family,
        })
    }

    /// Same problem, but every map is computed by integrating dx/dt = α(t, x).
    pub fn numeric(spec: ProblemSpec) -> Result<Self> {
        spec.validate()?;
        Ok(CharacteristicSolution {
            spec,
            family: Family::NumericFallback,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.family
    }

    fn length(&self) -> f64 {
        self.spec.domain.length
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t <= self.spec.t_end * (1.0 + 1e-12)) {
            return Err(Error::domain("t", t, format!("[0, {}]", self.spec.t_end)));
        }
        Ok(())
    }

    fn check_position(&self, what: &'static str, x: f64) -> Result<()> {
        let l = self.length();
        if !(x >= -1e-12 * l && x <= l * (1.0 + 1e-12)) {
            return Err(Error::domain(what, x, format!("[0, {l}]")));
        }
        Ok(())
    }

    /// F(t; s).
    pub fn map_forward(&self, t: f64, s: f64) -> Result<f64> {
        self.check_time(t)?;
        self.check_position("s", s)?;
        self.forward(t, s)
    }

    /// F(t; s) for any real t, including negative times (tracing a
    /// characteristic backwards past its label).
    pub fn map_forward_signed(&self, t: f64, s: f64) -> Result<f64> {
        self.forward(t, s)
    }

    /// G(t; x). `None` when x lies left of the front, where the outer density
    /// is zero.
    pub fn map_backward(&self, t: f64, x: f64) -> Result<Option<f64>> {
        self.check_time(t)?;
        self.check_position("x", x)?;
        if x < self.forward(t, 0.0)? {
            return Ok(None);
        }
        self.backward(t, x).map(Some)
    }

    /// x*(t) = F(t; 0).
    pub fn front_position(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        self.forward(t, 0.0)
    }

    /// dx*/dt = α(t, x*(t)); positive means rightward.
    pub fn front_speed(&self, t: f64) -> Result<f64> {
        let x = self.front_position(t)?;
        Ok(self.spec.alpha.value(t, x))
    }

    /// Samples x*(t), stopping at the first exit through x = L.
    pub fn front_trajectory(&self, times: &[f64]) -> Result<FrontTrajectory> {
        let l = self.length();
        let mut out = FrontTrajectory {
            times: Vec::with_capacity(times.len()),
            positions: Vec::with_capacity(times.len()),
            exit_time: None,
        };
        let mut prev_t = 0.0;
        for &t in times {
            let x = self.front_position(t)?;
            if x >= l {
                let te = bisect(
                    |tt| self.forward(tt, 0.0).map(|v| v - l).unwrap_or(1.0),
                    prev_t,
                    t,
                    1e-12,
                )
                .unwrap_or(t);
                out.times.push(te);
                out.positions.push(l);
                out.exit_time = Some(te);
                break;
            }
            out.times.push(t);
            out.positions.push(x.max(0.0));
            prev_t = t;
        }
        if self.family == Family::NumericFallback {
            if let Some(&t) = out.times.last() {
                self.check_no_crossing(t)?;
            }
        }
        Ok(out)
    }

    /// Diagnostic for the numeric fallback: F(t; ·) must be increasing.
    pub fn check_no_crossing(&self, t: f64) -> Result<()> {
        let l = self.length();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=16 {
            let x = self.forward(t, l * i as f64 / 16.0)?;
            if x <= prev {
                return Err(Error::CharacteristicsCross { t });
            }
            prev = x;
        }
        Ok(())
    }

    /// Outer density: zero left of the front, the characteristic solution of
    /// the logistic transport equation to the right.
    pub fn outer_density(&self, t: f64, x: f64) -> Result<f64> {
        match self.map_backward(t, x)? {
            None => Ok(0.0),
            Some(s) => self.density_on_label(t, s),
        }
    }

    /// O(u₀²)-accurate shortcut u₀(G) e^{β₀t} f(G)/f(x), for separable fields
    /// with constant growth and small initial density.
    pub fn outer_density_small_u0(&self, t: f64, x: f64) -> Result<f64> {
        let (f, beta) = match (&self.spec.alpha, self.spec.beta.as_constant()) {
            (ChemotaxisField::Separable { f, .. }, Some(b)) if self.spec.u0.is_small() => (f, b),
            _ => {
                return Err(Error::UnsupportedRegime(
                    "small-u0 shortcut needs a separable field, constant growth and max u0 <= 0.1".into(),
                ))
            }
        };
        match self.map_backward(t, x)? {
            None => Ok(0.0),
            Some(s) => Ok(self.spec.u0.value(s) * (beta * t).exp() * f.value(s) / f.value(x)),
        }
    }

    /// Outer density on the characteristic with label s at time t. The label
    /// may be any real; no domain check is made on F(t; s).
    pub fn density_on_label(&self, t: f64, s: f64) -> Result<f64> {
        let u0 = self.spec.u0.value(s);
        if t == 0.0 {
            return Ok(u0);
        }
        let opts = ode::OdeOptions::tol(FALLBACK_RTOL, FALLBACK_ATOL);
        let beta = &self.spec.beta;
        let (p, q) = if self.closed_position_is_cheap() {
            let y = ode::integrate(
                |eta, y: &[f64; 2]| {
                    let x = self.forward(eta, s).unwrap_or(f64::NAN);
                    let b = beta.value(eta, x);
                    [b - self.spec.alpha.derivative(eta, x), b * y[0].exp()]
                },
                0.0,
                [0.0, 0.0],
                t,
                &opts,
            )?;
            (y[0], y[1])
        } else {
            let y = ode::integrate(
                |eta, y: &[f64; 3]| {
                    let x = y[0];
                    let b = beta.value(eta, x);
                    [
                        self.spec.alpha.value(eta, x),
                        b - self.spec.alpha.derivative(eta, x),
                        b * y[1].exp(),
                    ]
                },
                0.0,
                [s, 0.0, 0.0],
                t,
                &opts,
            )?;
            (y[1], y[2])
        };
        Ok(u0 * p.exp() / (1.0 + u0 * q))
    }

    fn closed_position_is_cheap(&self) -> bool {
        match (&self.spec.alpha, self.family) {
            (_, Family::NumericFallback) => false,
            (ChemotaxisField::LinearInX { a, b }, _) => a.as_constant().is_some() || proportional(a, b).is_some(),
            _ => true,
        }
    }

    fn forward(&self, t: f64, s: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(s);
        }
        if self.family == Family::NumericFallback {
            return self.integrate_path(0.0, s, t);
        }
        match &self.spec.alpha {
            ChemotaxisField::LinearInX { a, b } => {
                let (big_a, i) = linear_parts(a, b, t)?;
                Ok(big_a.exp() * (s + i))
            }
            ChemotaxisField::Separable { f, g } => {
                flow(f, s, g.cumulative(t)).map_err(|_| self.blowup(f, g, s, t, 1.0))
            }
        }
    }

    fn backward(&self, t: f64, x: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(x);
        }
        if self.family == Family::NumericFallback {
            return self.integrate_path(t, x, 0.0);
        }
        match &self.spec.alpha {
            ChemotaxisField::LinearInX { a, b } => {
                let (big_a, i) = linear_parts(a, b, t)?;
                Ok((-big_a).exp() * x - i)
            }
            ChemotaxisField::Separable { f, g } => {
                flow(f, x, -g.cumulative(t)).map_err(|_| self.blowup(f, g, x, t, -1.0))
            }
        }
    }

    fn integrate_path(&self, t0: f64, x0: f64, t1: f64) -> Result<f64> {
        let opts = ode::OdeOptions::tol(FALLBACK_RTOL, FALLBACK_ATOL);
        let y = ode::integrate(|t, y: &[f64; 1]| [self.spec.alpha.value(t, y[0])], t0, [x0], t1, &opts)?;
        Ok(y[0])
    }

    fn blowup(&self, f: &SpaceFn, g: &TimeSignal, label: f64, t: f64, dir: f64) -> Error {
        let fails = |tt: f64| {
            if flow(f, label, dir * g.cumulative(tt)).is_err() {
                1.0
            } else {
                -1.0
            }
        };
        let critical_time = bisect(fails, 0.0, t, 1e-13 * t.abs().max(1.0));
        Error::FrontBlowup { critical_time, label }
    }
}

/// A(t) = ∫a and I(t) = ∫₀ᵗ b e^{-A} for α = a(t)x + b(t).
fn linear_parts(a: &TimeSignal, b: &TimeSignal, t: f64) -> Result<(f64, f64)> {
    let big_a = a.cumulative(t);
    let i = if let Some(c) = a.as_constant() {
        if c == 0.0 {
            b.cumulative(t)
        } else if let Some(v) = b.exp_weighted_integral(c, t) {
            v
        } else {
            quad::integrate(|eta| b.eval(eta) * (-c * eta).exp(), 0.0, t, 1e-13, 1e-15)?
        }
    } else if let Some(k) = proportional(a, b) {
        -k * (-big_a).exp_m1()
    } else {
        quad::integrate(|eta| b.eval(eta) * (-a.cumulative(eta)).exp(), 0.0, t, 1e-13, 1e-15)?
    };
    Ok((big_a, i))
}

/// k with b = k·a, when that holds structurally.
fn proportional(a: &TimeSignal, b: &TimeSignal) -> Option<f64> {
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-14 * x.abs().max(y.abs());
    match (a, b) {
        (
            TimeSignal::Cosine {
                amplitude: a1,
                omega: w1,
                offset: o1,
            },
            TimeSignal::Cosine {
                amplitude: a2,
                omega: w2,
                offset: o2,
            },
        ) if w1 == w2 && *a1 != 0.0 => {
            let k = a2 / a1;
            close(*o2, k * o1).then_some(k)
        }
        (TimeSignal::Ramp { rate: r1 }, TimeSignal::Ramp { rate: r2 }) if *r1 != 0.0 => Some(r2 / r1),
        _ => None,
    }
}

/// Position after following dx/dτ = f(x) for a signed τ from `s`.
/// `Err(())` when the closed form leaves its domain of validity.
pub(crate) fn flow(f: &SpaceFn, s: f64, tau: f64) -> std::result::Result<f64, ()> {
    if tau == 0.0 {
        return Ok(s);
    }
    match f {
        SpaceFn::Affine { a, b } => riccati(0.0, *a, *b, s, tau),
        SpaceFn::Quadratic { a, b, c } => riccati(*a, *b, *c, s, tau),
        // w = e^{λx}: w' = λ(a + b w²)
        SpaceFn::Exponential { a, b, lambda } => {
            let w = riccati(lambda * b, 0.0, lambda * a, (lambda * s).exp(), tau)?;
            positive_log(w).map(|l| l / lambda)
        }
        // w = e^{√λ x}: w' = (kλ/2)(w² ± 1)
        SpaceFn::CoshProfile { k, lambda } => {
            let h = 0.5 * k * lambda;
            let r = lambda.sqrt();
            let w = riccati(h, 0.0, h, (r * s).exp(), tau)?;
            positive_log(w).map(|l| l / r)
        }
        SpaceFn::SinhProfile { k, lambda } => {
            let h = 0.5 * k * lambda;
            let r = lambda.sqrt();
            let w = riccati(h, 0.0, -h, (r * s).exp(), tau)?;
            positive_log(w).map(|l| l / r)
        }
        SpaceFn::Numeric { .. } => {
            let opts = ode::OdeOptions::tol(FALLBACK_RTOL, FALLBACK_ATOL);
            ode::integrate(|_, y: &[f64; 1]| [f.value(y[0])], 0.0, [s], tau, &opts)
                .map(|y| y[0])
                .map_err(|_| ())
        }
    }
}

fn positive_log(w: f64) -> std::result::Result<f64, ()> {
    if w > 0.0 && w.is_finite() {
        Ok(w.ln())
    } else {
        Err(())
    }
}

/// Solution at time τ of y' = A y² + B y + C, y(0) = y0.
fn riccati(qa: f64, qb: f64, qc: f64, y0: f64, tau: f64) -> std::result::Result<f64, ()> {
    let y = if qa == 0.0 {
        if qb == 0.0 {
            y0 + qc * tau
        } else {
            y0 * (qb * tau).exp() + qc * (qb * tau).exp_m1() / qb
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        let shift = qb / (2.0 * qa);
        let z0 = y0 + shift;
        if disc.abs() <= 1e-14 * (qb * qb + (4.0 * qa * qc).abs()) {
            // z' = A z²
            let den = 1.0 - qa * z0 * tau;
            if den <= 0.0 {
                return Err(());
            }
            z0 / den - shift
        } else if disc < 0.0 {
            // z' = A (z² + q²)
            let q = (-disc).sqrt() / (2.0 * qa.abs());
            let theta = (z0 / q).atan() + qa * q * tau;
            if theta.abs() >= std::f64::consts::FRAC_PI_2 {
                return Err(());
            }
            q * theta.tan() - shift
        } else {
            // y' = A (y − r1)(y − r2)
            let sq = disc.sqrt();
            let sgn = if qb >= 0.0 { 1.0 } else { -1.0 };
            let qq = -0.5 * (qb + sgn * sq);
            let (r1, r2) = (qq / qa, qc / qq);
            let d = r1 - r2;
            let m = (qa * d * tau).exp_m1();
            if m.is_infinite() {
                return if y0 == r1 {
                    Ok(r1)
                } else if -(y0 - r1) / d > 0.0 {
                    Ok(r2)
                } else {
                    Err(())
                };
            }
            let den = d - m * (y0 - r1);
            if den / d <= 0.0 {
                return Err(());
            }
            (y0 * d - r2 * m * (y0 - r1)) / den
        }
    };
    if y.is_finite() {
        Ok(y)
    } else {
        Err(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{GrowthField, InitialProfile};
    use crate::problem::SpatialDomain;
    use proptest::prelude::*;
    use std::f64::consts::{E, LN_2, PI};

    fn spec(alpha: ChemotaxisField, t_end: f64) -> ProblemSpec {
        ProblemSpec {
            domain: SpatialDomain::default(),
            diffusion: 1e-3,
            alpha,
            beta: GrowthField::constant(1.0),
            u0: InitialProfile::uniform(0.05),
            t_end,
        }
    }

    fn sep(f: SpaceFn, t_end: f64) -> CharacteristicSolution {
        CharacteristicSolution::new(spec(ChemotaxisField::separable(f, TimeSignal::constant(1.0)), t_end)).unwrap()
    }

    fn linear(a: f64, b: f64, t_end: f64) -> CharacteristicSolution {
        CharacteristicSolution::new(spec(
            ChemotaxisField::linear(TimeSignal::constant(a), TimeSignal::constant(b)),
            t_end,
        ))
        .unwrap()
    }

    fn oscillatory() -> CharacteristicSolution {
        let g = TimeSignal::cosine(1.0, 10.0, 0.0);
        CharacteristicSolution::new(spec(ChemotaxisField::linear(g.clone(), g.scale(3.0)), 2.0)).unwrap()
    }

    /// One representative per closed-form family, with a horizon before any blow-up.
    fn families() -> Vec<CharacteristicSolution> {
        vec![
            linear(2.0, 1.0, 0.4),
            oscillatory(),
            sep(SpaceFn::Affine { a: -1.0, b: 2.0 }, 1.0),
            sep(SpaceFn::Quadratic { a: 1.0, b: 2.0, c: 1.0 }, 0.25),
            sep(SpaceFn::Quadratic { a: 2.0, b: 2.0, c: 2.0 }, 0.25),
            sep(SpaceFn::Quadratic { a: 1.0, b: 4.0, c: 1.0 }, 0.25),
            sep(
                SpaceFn::Exponential {
                    a: 2.0,
                    b: 0.0,
                    lambda: 1.0,
                },
                0.8,
            ),
            sep(
                SpaceFn::Exponential {
                    a: 2.0,
                    b: 0.5,
                    lambda: 1.0,
                },
                0.3,
            ),
            sep(
                SpaceFn::Exponential {
                    a: 2.0,
                    b: -0.3,
                    lambda: 1.0,
                },
                0.5,
            ),
            sep(SpaceFn::CoshProfile { k: 1.0, lambda: 0.1 }, 2.0),
            sep(SpaceFn::SinhProfile { k: 1.0, lambda: 0.1 }, 2.0),
        ]
    }

    #[test]
    fn linear_forward_map() {
        let cs = linear(2.0, 1.0, 1.0);
        assert!((cs.map_forward(LN_2 / 2.0, 0.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn identity_at_time_zero() {
        for cs in families() {
            assert_eq!(cs.map_forward(0.0, 0.3).unwrap(), 0.3);
            assert_eq!(cs.map_backward(0.0, 0.3).unwrap(), Some(0.3));
            assert_eq!(cs.front_position(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn degenerate_quadratic_front() {
        let cs = sep(SpaceFn::Quadratic { a: 1.0, b: 2.0, c: 1.0 }, 0.9);
        assert!((cs.front_position(0.5).unwrap() - 1.0).abs() < 1e-14);
        // rational closed form
        let (a, b, s, tt) = (1.0, 2.0, 0.2, 0.3);
        let expected =
            (4.0 * a * s + 2.0 * a * b * s * tt + b * b * tt) / (4.0 * a - 2.0 * a * b * tt - 4.0 * a * a * s * tt);
        assert!((cs.map_forward(tt, s).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn degenerate_quadratic_blows_up_at_one() {
        let mut s = spec(
            ChemotaxisField::separable(SpaceFn::Quadratic { a: 1.0, b: 2.0, c: 1.0 }, TimeSignal::constant(1.0)),
            2.0,
        );
        s.domain.length = 100.0;
        let cs = CharacteristicSolution::new(s).unwrap();
        match cs.front_position(1.5) {
            Err(Error::FrontBlowup {
                critical_time: Some(tc),
                label,
            }) => {
                assert!((tc - 1.0).abs() < 1e-9);
                assert_eq!(label, 0.0);
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn complex_quadratic_tan_branch_blows_up() {
        let cs = sep(SpaceFn::Quadratic { a: 2.0, b: 2.0, c: 2.0 }, 1.0);
        // θ = π/6 + √3 T reaches π/2 at T = π/(3√3)
        let tc = PI / (3.0 * 3f64.sqrt());
        match cs.map_forward_signed(tc + 0.01, 0.0) {
            Err(Error::FrontBlowup { critical_time, .. }) => {
                assert!((critical_time.unwrap() - tc).abs() < 1e-9)
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn exponential_maps() {
        let cs = sep(
            SpaceFn::Exponential {
                a: 2.0,
                b: 0.0,
                lambda: 1.0,
            },
            1.0,
        );
        let g = cs.map_backward(0.5, 1.0).unwrap().unwrap();
        assert!((g - (E - 1.0).ln()).abs() < 1e-14);
        assert!((g - 0.5413).abs() < 1e-4);
        assert!((cs.front_position((E - 1.0) / 2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_tan_form_matches_tan_closed_form() {
        let (a, b, lam) = (2.0, 0.5, 1.0);
        let cs = sep(SpaceFn::Exponential { a, b, lambda: lam }, 0.3);
        let r = (a * b).sqrt();
        for &(t, s) in &[(0.1, 0.0), (0.2, 0.4), (0.3, 0.9)] {
            let tn = (r * lam * t).tan();
            let e = (-lam * s).exp();
            let expected = ((r + a * tn * e) / (r * e - b * tn)).ln() / lam;
            assert!((cs.map_forward(t, s).unwrap() - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn cosh_profile_matches_tan_form() {
        let (k, lam) = (1.0, 0.1);
        let cs = sep(SpaceFn::CoshProfile { k, lambda: lam }, 2.0);
        let r = lam.sqrt();
        for &(t, s) in &[(2.0 / 3.0, 0.0), (1.0, 0.3), (2.0, 0.8)] {
            let sc = (k * lam * t / 2.0).tan();
            let e = (-s * r).exp();
            let expected = ((1.0 + e * sc) / (e - sc)).ln() / r;
            assert!((cs.map_forward(t, s).unwrap() - expected).abs() < 1e-13);
        }
        assert!((cs.front_position(2.0 / 3.0).unwrap() - 0.2110).abs() < 1e-4);
    }

    #[test]
    fn sinh_profile_matches_artanh_form() {
        let (k, lam) = (1.0, 0.1);
        let cs = sep(SpaceFn::SinhProfile { k, lambda: lam }, 2.0);
        let r = lam.sqrt();
        for &(t, s) in &[(0.5, 0.2), (1.0, 0.5), (2.0, 1.0)] {
            let closed = 2.0 / r * ((k * lam * t).exp() * (s * r / 2.0).tanh()).atanh();
            assert!((cs.map_forward(t, s).unwrap() - closed).abs() < 1e-13);
        }
        assert_eq!(cs.front_position(1.7).unwrap(), 0.0);
    }

    #[test]
    fn oscillatory_front_returns_to_origin() {
        let cs = oscillatory();
        let t = PI / 10.0;
        assert!(cs.front_position(t).unwrap().abs() < 1e-14);
        let t: f64 = 0.07;
        let closed = 3.0 * ((0.1 * (10.0 * t).sin()).exp() - 1.0);
        assert!((cs.front_position(t).unwrap() - closed).abs() < 1e-14);
    }

    #[test]
    fn front_speeds() {
        let high = linear(0.1, 0.95, 1.0);
        assert!((high.front_speed(0.0).unwrap() - 0.95).abs() < 1e-14);
        let low = sep(SpaceFn::CoshProfile { k: 1.0, lambda: 0.1 }, 1.0);
        assert!((low.front_speed(0.0).unwrap() - 0.1f64.sqrt()).abs() < 1e-14);
        for cs in [&high, &low] {
            let t = 0.6;
            let h = 1e-5;
            let fd = (cs.front_position(t + h).unwrap() - cs.front_position(t - h).unwrap()) / (2.0 * h);
            assert!((fd - cs.front_speed(t).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn linear_outer_density() {
        let mut s = spec(
            ChemotaxisField::linear(TimeSignal::constant(2.0), TimeSignal::constant(1.0)),
            1.0,
        );
        s.domain.length = 5.0;
        let cs = CharacteristicSolution::new(s).unwrap();
        let e = (-1f64).exp();
        let exact = 0.05 * e / (1.0 + 0.05 * (1.0 - e));
        assert!((cs.outer_density(1.0, 4.0).unwrap() - exact).abs() < 1e-12);
        assert!((exact - 0.017831).abs() < 1e-6);
        assert_eq!(cs.outer_density(1.0, 0.9).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_quadratic_density() {
        let cs = sep(SpaceFn::Quadratic { a: 1.0, b: 2.0, c: 1.0 }, 0.25);
        let (t, x) = (0.25, 0.5);
        let shortcut = cs.outer_density_small_u0(t, x).unwrap();
        let expected = 4.0 * 0.05 * t.exp() / (2.0 + 2.0 * t + 2.0 * t * x).powi(2);
        assert!((shortcut - expected).abs() < 1e-13);
        assert!((expected - 0.03396).abs() < 1e-5);
        let full = cs.outer_density(t, x).unwrap();
        assert!((full - shortcut).abs() / shortcut < 0.02);
    }

    #[test]
    fn exponential_small_u0_density() {
        let cs = sep(
            SpaceFn::Exponential {
                a: 2.0,
                b: 0.0,
                lambda: 1.0,
            },
            1.0,
        );
        let v = cs.outer_density_small_u0(0.5, 1.0).unwrap();
        let expected = 0.05 * 0.5f64.exp() / (1.0 - (-1f64).exp());
        assert!((v - expected).abs() < 1e-13);
        assert!((v - 0.1304).abs() < 1e-4);
        assert_eq!(cs.outer_density_small_u0(0.0, 0.4).unwrap(), 0.05);
    }

    #[test]
    fn small_u0_discrepancy_is_quadratic() {
        let mut s = spec(
            ChemotaxisField::separable(
                SpaceFn::Exponential {
                    a: 2.0,
                    b: 0.0,
                    lambda: 1.0,
                },
                TimeSignal::constant(1.0),
            ),
            1.0,
        );
        let gap = |s: &ProblemSpec| {
            let cs = CharacteristicSolution::new(s.clone()).unwrap();
            (cs.outer_density(0.5, 1.0).unwrap() - cs.outer_density_small_u0(0.5, 1.0).unwrap()).abs()
        };
        let d1 = gap(&s);
        s.u0 = InitialProfile::uniform(0.025);
        let d2 = gap(&s);
        let ratio = d1 / d2;
        assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
    }

    #[test]
    fn small_u0_needs_separable_constant_growth() {
        let cs = linear(2.0, 1.0, 1.0);
        assert!(matches!(
            cs.outer_density_small_u0(0.5, 0.9),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn trajectory_reports_exit() {
        let cs = linear(2.0, 1.0, 1.0);
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
        let tr = cs.front_trajectory(&times).unwrap();
        let exact = 3f64.ln() / 2.0;
        assert!((tr.exit_time.unwrap() - exact).abs() < 1e-10);
        assert_eq!(*tr.positions.last().unwrap(), 1.0);
        assert!(tr.to_csv().starts_with("t,x_star\n0,0\n"));
    }

    #[test]
    fn numeric_table_uses_fallback() {
        let knots: Vec<f64> = (0..=200).map(|i| i as f64 / 100.0).collect();
        let values = knots.iter().map(|x| 2.0 * x + 1.0).collect();
        let s = spec(
            ChemotaxisField::separable(SpaceFn::Numeric { knots, values }, TimeSignal::constant(1.0)),
            0.4,
        );
        let cs = CharacteristicSolution::new(s).unwrap();
        assert_eq!(cs.family(), Family::NumericFallback);
        let exact = 0.5 * ((2.0f64 * 0.3).exp() - 1.0);
        assert!((cs.front_position(0.3).unwrap() - exact).abs() < 1e-9);
        cs.check_no_crossing(0.4).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn inversion_and_separatrix(ft in 0.0f64..1.0, fx in 0.0f64..1.0) {
            for cs in families() {
                let t = ft * cs.spec().t_end;
                let xs = cs.front_position(t).unwrap();
                let lo = xs.max(0.0);
                if lo >= 1.0 { continue; }
                if xs >= 0.0 {
                    prop_assert!(cs.map_backward(t, xs).unwrap().unwrap().abs() < 1e-10);
                }
                let x = lo + fx * (1.0 - lo);
                let g = cs.map_backward(t, x).unwrap().unwrap();
                let back = cs.map_forward_signed(t, g).unwrap();
                prop_assert!((back - x).abs() <= 1e-10 * x.abs().max(1e-3), "{:?}: {} vs {}", cs.family(), back, x);
            }
        }

        #[test]
        fn closed_form_matches_fallback(ft in 0.0f64..1.0, s in 0.0f64..1.0) {
            for cs in families() {
                let t = ft * cs.spec().t_end;
                let num = CharacteristicSolution::numeric(cs.spec().clone()).unwrap();
                let a = cs.map_forward(t, s).unwrap();
                let b = num.map_forward(t, s).unwrap();
                prop_assert!((a - b).abs() < 1e-7, "{:?}: {} vs {}", cs.family(), a, b);
            }
        }

        #[test]
        fn even_drive_symmetry(t in 0.0f64..2.0, x in 0.0f64..1.0) {
            let cs = oscillatory();
            let g = cs.map_backward(t, x).unwrap();
            let f = cs.map_forward_signed(-t, x).unwrap();
            if let Some(g) = g {
                prop_assert!((g - f).abs() <= 1e-10 * f.abs().max(1.0));
            }
        }

        #[test]
        fn exponential_denominator_positive(ft in 0.0f64..1.0, fx in 0.0f64..1.0) {
            let (a, lam) = (2.0, 1.0);
            let cs = sep(SpaceFn::Exponential { a, b: 0.0, lambda: lam }, 2.0);
            let t = 2.0 * ft;
            let xs = cs.front_position(t).unwrap();
            let x = xs + fx * 3.0;
            let den = 1.0 - a * lam * t * (-lam * x).exp();
            prop_assert!(den >= 1.0 / (1.0 + a * lam * t) - 1e-15);
            prop_assert!(den > 0.0);
        }
    }
}
