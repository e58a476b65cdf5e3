//! The transport problem u_t + (αu)_x = D u_xx + β u(1 − u) on [0, L] with
//! zero-flux ends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ChemotaxisField, Family, GrowthField, InitialProfile};

/// Diffusion above this is flagged: the outer approximation assumes D ≪ 1.
pub const DIFFUSION_WARNING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialDomain {
    pub length: f64,
    pub cells: usize,
}

impl Default for SpatialDomain {
    fn default() -> Self {
        SpatialDomain {
            length: 1.0,
            cells: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    #[serde(default)]
    pub domain: SpatialDomain,
    pub diffusion: f64,
    pub alpha: ChemotaxisField,
    #[serde(default)]
    pub beta: GrowthField,
    #[serde(default)]
    pub u0: InitialProfile,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    pub(crate) fn new(field: &str, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            message: message.into(),
        }
    }
}

/// Outcome of a successful validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecReport {
    pub family: Family,
    pub closed_form: bool,
    pub small_u0: bool,
    pub warnings: Vec<String>,
}

impl ProblemSpec {
    pub fn length(&self) -> f64 {
        self.domain.length
    }

    fn check_point(&self, t: f64, x: f64) -> Result<()> {
        let l = self.domain.length;
        if !(x >= -1e-12 * l && x <= l * (1.0 + 1e-12)) {
            return Err(Error::domain("x", x, format!("[0, {l}]")));
        }
        if !(t >= 0.0 && t <= self.t_end * (1.0 + 1e-12)) {
            return Err(Error::domain("t", t, format!("[0, {}]", self.t_end)));
        }
        Ok(())
    }

    /// α(t, x), checked against the space-time domain.
    pub fn alpha_at(&self, t: f64, x: f64) -> Result<f64> {
        self.check_point(t, x)?;
        Ok(self.alpha.value(t, x))
    }

    /// ∂α/∂x (t, x), checked against the space-time domain.
    pub fn alpha_x_at(&self, t: f64, x: f64) -> Result<f64> {
        self.check_point(t, x)?;
        Ok(self.alpha.derivative(t, x))
    }

    pub fn beta_at(&self, t: f64, x: f64) -> f64 {
        self.beta.value(t, x)
    }

    pub fn validate(&self) -> Result<SpecReport> {
        let mut v = Vec::new();
        let mut warnings = Vec::new();
        let l = self.domain.length;

        if !(l > 0.0 && l.is_finite()) {
            v.push(Violation::new("domain.length", "length must be positive"));
        }
        if self.domain.cells < 8 {
            v.push(Violation::new("domain.cells", "need at least 8 cells"));
        }
        if !(self.diffusion >= 0.0 && self.diffusion.is_finite()) {
            v.push(Violation::new("diffusion", "diffusion must be nonnegative"));
        } else if self.diffusion > DIFFUSION_WARNING {
            warnings.push(format!(
                "outer approximation regime violated: D = {} > {DIFFUSION_WARNING}",
                self.diffusion
            ));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            v.push(Violation::new("t_end", "final time must be positive"));
        }

        match &self.alpha {
            ChemotaxisField::LinearInX { a, b } => {
                if let Some(m) = a.check() {
                    v.push(Violation::new("alpha.a", m));
                }
                if let Some(m) = b.check() {
                    v.push(Violation::new("alpha.b", m));
                }
            }
            ChemotaxisField::Separable { f, g } => {
                if let Some(m) = f.check() {
                    v.push(Violation::new("alpha.f", m));
                }
                if let Some(m) = g.check() {
                    v.push(Violation::new("alpha.g", m));
                }
            }
        }

        match &self.beta {
            GrowthField::Constant { value } if !(*value >= 0.0) => {
                v.push(Violation::new("beta", "growth rate must be nonnegative"));
            }
            GrowthField::Numeric { knots, values } => {
                if knots.len() != values.len() || knots.is_empty() || knots.windows(2).any(|w| !(w[1] > w[0])) {
                    v.push(Violation::new("beta", "numeric table needs strictly increasing knots"));
                } else if values.iter().any(|b| !(*b >= 0.0)) {
                    v.push(Violation::new("beta", "growth rate must be nonnegative"));
                }
            }
            _ => {}
        }

        match &self.u0 {
            InitialProfile::Sampled { knots, values }
                if knots.len() != values.len() || knots.is_empty() || knots.windows(2).any(|w| !(w[1] > w[0])) =>
            {
                v.push(Violation::new("u0", "sampled profile needs strictly increasing knots"));
            }
            u0 => {
                if u0.max() > 1.0 {
                    v.push(Violation::new("u0", "density above carrying capacity"));
                }
                if !(u0.min() >= 0.0) {
                    v.push(Violation::new("u0", "negative density"));
                }
            }
        }

        if v.is_empty() {
            let mut alpha_ok = true;
            let mut beta_ok = true;
            for i in 0..=32 {
                let t = self.t_end * i as f64 / 32.0;
                for j in 0..=32 {
                    let x = l * j as f64 / 32.0;
                    alpha_ok &= self.alpha.value(t, x).is_finite() && self.alpha.derivative(t, x).is_finite();
                    beta_ok &= self.beta.value(t, x) >= -1e-14;
                }
            }
            if !alpha_ok {
                v.push(Violation::new("alpha", "not finite on [0, t_end] x [0, L]"));
            }
            if !beta_ok {
                if matches!(self.beta, GrowthField::LinearInV { .. }) {
                    warnings.push(
                        "growth rate m0 v turns negative where the chemoattractant profile dips below zero".into(),
                    );
                } else {
                    v.push(Violation::new("beta", "growth rate must be nonnegative"));
                }
            }
        }

        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        let family = self.alpha.family();
        Ok(SpecReport {
            family,
            closed_form: family.is_closed_form(),
            small_u0: self.u0.is_small(),
            warnings,
        })
    }
}
