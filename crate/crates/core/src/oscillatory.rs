//! Asymptotic regimes of r' + (β − a cos ωt) r = β, r(0) = r*: the
//! reciprocal density to the right of the front under an oscillating linear
//! chemotactic field with homogeneous growth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorySpec {
    pub a: f64,
    pub beta: f64,
    pub omega: f64,
    pub r_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Slow,
    Fast,
    DominantChemotaxis,
    DominantGrowth,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::Slow,
        Regime::Fast,
        Regime::DominantChemotaxis,
        Regime::DominantGrowth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Slow => "slow",
            Regime::Fast => "fast",
            Regime::DominantChemotaxis => "dominant_chemotaxis",
            Regime::DominantGrowth => "dominant_growth",
        }
    }
}

impl OscillatorySpec {
    pub fn new(a: f64, beta: f64, omega: f64, r_star: f64) -> Result<Self> {
        let s = OscillatorySpec { a, beta, omega, r_star };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::domain("beta", self.beta, "(0, inf)"));
        }
        if !(self.omega > 0.0) {
            return Err(Error::domain("omega", self.omega, "(0, inf)"));
        }
        if !(self.a >= 0.0) {
            return Err(Error::domain("a", self.a, "[0, inf)"));
        }
        if !(self.r_star >= 1.0) {
            return Err(Error::domain("r_star", self.r_star, "[1, inf)"));
        }
        Ok(())
    }

    fn rhs(&self, t: f64, r: f64) -> f64 {
        self.beta - (self.beta - self.a * (self.omega * t).cos()) * r
    }

    /// Adaptive Runge–Kutta solution.
    pub fn r_reference(&self, t: f64) -> Result<f64> {
        Ok(self.r_reference_many(&[t])?[0])
    }

    /// Reference solution at increasing times, in one sweep.
    pub fn r_reference_many(&self, times: &[f64]) -> Result<Vec<f64>> {
        let opts = ode::OdeOptions::tol(1e-12, 1e-14);
        let ys = ode::integrate_to(|t, y: &[f64; 1]| [self.rhs(t, y[0])], 0.0, [self.r_star], times, &opts)?;
        Ok(ys.into_iter().map(|y| y[0]).collect())
    }

    /// Slowly varying gradient (ω ≪ 1), WKB form. Needs β > a.
    pub fn r_slow_wkb(&self, t: f64) -> Result<f64> {
        let (a, b, w) = (self.a, self.beta, self.omega);
        if b <= a {
            return Err(Error::UnsupportedRegime(format!(
                "slow-variation approximation needs beta > a (beta = {b}, a = {a})"
            )));
        }
        let quasi = b / (b - a * (w * t).cos());
        let transient = (self.r_star - b / (b - a)) * (-b * t + (a / w) * (w * t).sin()).exp();
        Ok(quasi + transient)
    }

    /// Rapidly oscillating gradient (ω ≫ 1), first-order multiple scales.
    pub fn r_fast_multiscale(&self, t: f64) -> f64 {
        let (a, b, w) = (self.a, self.beta, self.omega);
        let decay = (-b * t).exp();
        (self.r_star * decay + 1.0 - decay) * (1.0 + (a / w) * (w * t).sin())
    }

    /// Chemotaxis dominates growth (β ≪ a), leading order.
    pub fn r_dominant_chemotaxis(&self, t: f64) -> f64 {
        self.r_star * ((self.a / self.omega) * (self.omega * t).sin()).exp()
    }

    /// Growth dominates chemotaxis (a ≪ β): r₀ + (a/β) r₁.
    pub fn r_dominant_growth(&self, t: f64) -> f64 {
        let (a, b, w) = (self.a, self.beta, self.omega);
        let g2 = b * b + w * w;
        let decay = (-b * t).exp();
        let (s, c) = (w * t).sin_cos();
        let r0 = self.r_star * decay + 1.0 - decay;
        let r1 = b * ((self.r_star - 1.0) * g2 * s * decay + w * w * s + w * b * c) / (w * g2) - b * b / g2 * decay;
        r0 + (a / b) * r1
    }

    pub fn approximation(&self, regime: Regime, t: f64) -> Result<f64> {
        Ok(match regime {
            Regime::Slow => self.r_slow_wkb(t)?,
            Regime::Fast => self.r_fast_multiscale(t),
            Regime::DominantChemotaxis => self.r_dominant_chemotaxis(t),
            Regime::DominantGrowth => self.r_dominant_growth(t),
        })
    }

    /// The regime whose small parameter (ω, 1/ω, β/a, a/β) is smallest, with
    /// that parameter as score. Ties go to the earlier regime in that order.
    pub fn regime_select(&self) -> (Regime, f64) {
        let (a, b, w) = (self.a, self.beta, self.omega);
        let scores = [w, 1.0 / w, if a > 0.0 { b / a } else { f64::INFINITY }, a / b];
        let mut best = (Regime::Slow, scores[0]);
        for (r, &s) in Regime::ALL.iter().zip(&scores).skip(1) {
            if s < best.1 {
                best = (*r, s);
            }
        }
        best
    }

    /// max |approximation − reference| over `samples` equally spaced times in
    /// [0, t_max].
    pub fn sup_error(&self, regime: Regime, t_max: f64, samples: usize) -> Result<f64> {
        let times: Vec<f64> = (0..samples).map(|i| t_max * i as f64 / (samples - 1) as f64).collect();
        let reference = self.r_reference_many(&times)?;
        let mut err = 0.0f64;
        for (t, r) in times.iter().zip(reference) {
            err = err.max((self.approximation(regime, *t)? - r).abs());
        }
        Ok(err)
    }

    /// (t, r_regime, r_reference, |error|) rows.
    pub fn table(&self, regime: Regime, times: &[f64]) -> Result<Vec<[f64; 4]>> {
        let reference = self.r_reference_many(times)?;
        times
            .iter()
            .zip(reference)
            .map(|(&t, r)| {
                let v = self.approximation(regime, t)?;
                Ok([t, v, r, (v - r).abs()])
            })
            .collect()
    }
}

/// u = 1/r.
pub fn u_from_r(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::domain("r", r, "(0, inf)"));
    }
    Ok(1.0 / r)
}
