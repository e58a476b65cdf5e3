//! Cell cultures in a microfluidic chamber on [0, 1]: a chemoattractant v
//! supplied through the walls drives both chemotaxis (α = k v_x) and growth
//! (β = m(v)). Builds the transport problem for each consumption regime and
//! evaluates its closed-form fronts and densities.

use serde::{Deserialize, Serialize};

use crate::characteristics::CharacteristicSolution;
use crate::error::{Error, Result};
use crate::field::{ChemoProfile, ChemotaxisField, GrowthField, InitialProfile, SpaceFn};
use crate::numerics::{bisect, quad};
use crate::problem::{ProblemSpec, SpatialDomain, Violation};
use crate::signal::TimeSignal;

/// Dimensional inputs. Any consistent unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionalParams {
    /// Cell diffusivity.
    pub d_cell: f64,
    /// Chemotactic sensitivity χ.
    pub chi: f64,
    /// Chemoattractant diffusivity.
    pub d_agent: f64,
    /// Cell growth rate.
    pub growth_rate: f64,
    /// Per-cell uptake rate.
    pub uptake_rate: f64,
    /// Carrying capacity of the cell density.
    pub c_sat: f64,
    /// Chemoattractant concentration scale.
    pub agent_scale: f64,
    /// Chamber length.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// No uptake: v is linear between the wall values.
    WeakConsumption,
    /// Saturated uptake at a constant rate λ: v is quadratic.
    HighNutrient,
    /// Uptake proportional to v, v(0) = 0 and v(1) driven.
    LowNutrientGradient,
    /// Uptake proportional to v, symmetric chamber (no flux at x = 0).
    LowNutrientSymmetric,
}

impl Regime {
    pub const ALL: [Regime; 4] = [
        Regime::WeakConsumption,
        Regime::HighNutrient,
        Regime::LowNutrientGradient,
        Regime::LowNutrientSymmetric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::WeakConsumption => "weak_consumption",
            Regime::HighNutrient => "high_nutrient",
            Regime::LowNutrientGradient => "low_nutrient_gradient",
            Regime::LowNutrientSymmetric => "low_nutrient_symmetric",
        }
    }
}

/// How the hyperbolic low-nutrient profiles are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// v = ψ sinh(√λx) and v = ψ cosh(√λx).
    #[default]
    Verbatim,
    /// Divided by sinh √λ (cosh √λ) so that v(1) = ψ.
    Normalized,
}

/// Growth law m(v).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthLaw {
    Constant {
        value: f64,
    },
    /// m(v) = m₀ v
    Linear {
        m0: f64,
    },
}

impl GrowthLaw {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            GrowthLaw::Constant { value } => *value,
            GrowthLaw::Linear { m0 } => m0 * v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kinetics {
    MichaelisMenten { k_m: f64 },
    Hill { k_h: f64, n: f64 },
}

/// Per-cell uptake fraction in [0, 1).
pub fn uptake_per_cell(v: f64, kinetics: Kinetics) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::domain("v", v, "[0, inf)"));
    }
    Ok(match kinetics {
        Kinetics::MichaelisMenten { k_m } => v / (v + k_m),
        Kinetics::Hill { k_h, n } => {
            let vn = v.powf(n);
            vn / (vn + k_h.powf(n))
        }
    })
}

fn default_cells() -> usize {
    1024
}

/// Dimensionless microdevice scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrodeviceSpec {
    pub regime: Regime,
    /// Cell diffusion.
    pub pi1: f64,
    /// Chemotactic strength k.
    pub pi2: f64,
    /// Chemoattractant diffusion.
    pub pi3: f64,
    /// Uptake to growth ratio.
    pub pi4: f64,
    /// Consumption parameter; ignored for weak consumption.
    #[serde(default)]
    pub lambda: f64,
    #[serde(default = "zero_signal")]
    pub psi1: TimeSignal,
    pub psi2: TimeSignal,
    pub m: GrowthLaw,
    pub u0: InitialProfile,
    pub t_end: f64,
    #[serde(default = "default_cells")]
    pub cells: usize,
    #[serde(default)]
    pub normalization: Normalization,
}

fn zero_signal() -> TimeSignal {
    TimeSignal::constant(0.0)
}

/// Regime-specific inputs to [`nondimensionalize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeInputs {
    pub regime: Regime,
    /// Saturated uptake constant K.
    #[serde(default)]
    pub uptake_constant: f64,
    /// Michaelis constant k_m for the low-nutrient linearisation.
    #[serde(default = "one")]
    pub k_m: f64,
    #[serde(default = "zero_signal")]
    pub psi1: TimeSignal,
    pub psi2: TimeSignal,
    pub m: GrowthLaw,
    pub u0: InitialProfile,
    pub t_end: f64,
}

fn one() -> f64 {
    1.0
}

pub fn nondimensionalize(dp: &DimensionalParams, inputs: &RegimeInputs) -> Result<MicrodeviceSpec> {
    let named = [
        ("d_cell", dp.d_cell),
        ("chi", dp.chi),
        ("d_agent", dp.d_agent),
        ("growth_rate", dp.growth_rate),
        ("uptake_rate", dp.uptake_rate),
        ("c_sat", dp.c_sat),
        ("agent_scale", dp.agent_scale),
        ("length", dp.length),
    ];
    let bad: Vec<Violation> = named
        .iter()
        .filter(|(_, v)| !(*v > 0.0 && v.is_finite()))
        .map(|(n, _)| Violation::new(n, "must be positive"))
        .collect();
    if !bad.is_empty() {
        return Err(Error::Validation(bad));
    }
    let scale = dp.growth_rate * dp.length * dp.length;
    let pi1 = dp.d_cell / scale;
    let pi2 = dp.chi * dp.agent_scale / scale;
    let pi3 = dp.d_agent / scale;
    let pi4 = dp.uptake_rate * dp.c_sat / (dp.growth_rate * dp.agent_scale);
    let lambda = match inputs.regime {
        Regime::WeakConsumption => 0.0,
        Regime::HighNutrient => pi4 * inputs.uptake_constant / pi3,
        Regime::LowNutrientGradient | Regime::LowNutrientSymmetric => pi4 * inputs.uptake_constant / (inputs.k_m * pi3),
    };
    Ok(MicrodeviceSpec {
        regime: inputs.regime,
        pi1,
        pi2,
        pi3,
        pi4,
        lambda,
        psi1: inputs.psi1.clone(),
        psi2: inputs.psi2.clone(),
        m: inputs.m,
        u0: inputs.u0.clone(),
        t_end: inputs.t_end,
        cells: default_cells(),
        normalization: Normalization::Verbatim,
    })
}

/// Wall drive shapes of the reference scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Drive {
    /// ψ = 1
    Steady,
    /// ψ = 1 + cos(10πt)
    Pulsed,
    /// ψ = t
    Ramp,
}

impl Drive {
    pub const ALL: [Drive; 3] = [Drive::Steady, Drive::Pulsed, Drive::Ramp];

    pub fn signal(self) -> TimeSignal {
        match self {
            Drive::Steady => TimeSignal::constant(1.0),
            Drive::Pulsed => TimeSignal::cosine(1.0, 10.0 * std::f64::consts::PI, 1.0),
            Drive::Ramp => TimeSignal::ramp(1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Drive::Steady => "steady",
            Drive::Pulsed => "pulsed",
            Drive::Ramp => "ramp",
        }
    }
}

impl MicrodeviceSpec {
    /// Scenario with D = 10⁻⁴, k = 1, m(v) = v, u₀ = 0.05, Π₃ = 100 and
    /// λ = 0.1 outside weak consumption.
    pub fn scenario(regime: Regime, drive: Drive) -> Self {
        MicrodeviceSpec {
            regime,
            pi1: 1e-4,
            pi2: 1.0,
            pi3: 100.0,
            pi4: 1.0,
            lambda: if regime == Regime::WeakConsumption { 0.0 } else { 0.1 },
            psi1: zero_signal(),
            psi2: drive.signal(),
            m: GrowthLaw::Linear { m0: 1.0 },
            u0: InitialProfile::uniform(0.05),
            t_end: 1.0,
            cells: default_cells(),
            normalization: Normalization::Verbatim,
        }
    }

    pub fn k(&self) -> f64 {
        self.pi2
    }

    /// Hard violations as an error, soft ones as warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut v = Vec::new();
        let mut warnings = Vec::new();
        if !(self.pi1 >= 0.0) {
            v.push(Violation::new("pi1", "must be nonnegative"));
        }
        if !(self.pi2 >= 0.0) {
            v.push(Violation::new("pi2", "must be nonnegative"));
        }
        if !(self.pi3 > 0.0) {
            v.push(Violation::new("pi3", "must be positive"));
        }
        if !(self.lambda >= 0.0) {
            v.push(Violation::new("lambda", "must be nonnegative"));
        }
        let low = matches!(self.regime, Regime::LowNutrientGradient | Regime::LowNutrientSymmetric);
        if low && !(self.lambda > 0.0) {
            v.push(Violation::new("lambda", "low-nutrient profiles need lambda > 0"));
        }
        if !(self.t_end > 0.0) {
            v.push(Violation::new("t_end", "must be positive"));
        }
        for (name, s) in [("psi1", &self.psi1), ("psi2", &self.psi2)] {
            if let Some(m) = s.check() {
                v.push(Violation::new(name, m));
            }
        }
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        if self.pi3 < 10.0 {
            warnings.push(format!(
                "pi3 = {} is not large; the quasi-steady profile may lag",
                self.pi3
            ));
        }
        if self.regime != Regime::WeakConsumption && !(self.lambda > 1.0 / self.pi3 && self.lambda < self.pi3) {
            warnings.push(format!(
                "lambda = {} is not order one relative to pi3 = {}",
                self.lambda, self.pi3
            ));
        }
        if self.regime == Regime::HighNutrient {
            let dips = (0..=32)
                .map(|i| self.t_end * i as f64 / 32.0)
                .any(|t| self.psi2.eval(t) - self.psi1.eval(t) < 0.5 * self.lambda);
            if dips {
                warnings.push("chemoattractant profile dips below zero (psi2 - psi1 < lambda/2)".into());
            }
        }
        Ok(warnings)
    }

    fn scale(&self) -> f64 {
        let r = self.lambda.sqrt();
        match (self.normalization, self.regime) {
            (Normalization::Normalized, Regime::LowNutrientGradient) => 1.0 / r.sinh(),
            (Normalization::Normalized, Regime::LowNutrientSymmetric) => 1.0 / r.cosh(),
            _ => 1.0,
        }
    }

    /// Outer (quasi-steady) chemoattractant profile.
    pub fn profile(&self) -> ChemoProfile {
        match self.regime {
            Regime::WeakConsumption => ChemoProfile::Linear {
                psi1: self.psi1.clone(),
                psi2: self.psi2.clone(),
            },
            Regime::HighNutrient => ChemoProfile::Quadratic {
                lambda: self.lambda,
                psi1: self.psi1.clone(),
                psi2: self.psi2.clone(),
            },
            Regime::LowNutrientGradient => ChemoProfile::Sinh {
                lambda: self.lambda,
                psi: self.psi2.clone(),
                scale: self.scale(),
            },
            Regime::LowNutrientSymmetric => ChemoProfile::Cosh {
                lambda: self.lambda,
                psi: self.psi2.clone(),
                scale: self.scale(),
            },
        }
    }

    pub fn chemo_profile(&self, t: f64, x: f64) -> f64 {
        self.profile().value(t, x)
    }

    pub fn growth_field(&self) -> GrowthField {
        match self.m {
            GrowthLaw::Constant { value } => GrowthField::constant(value),
            GrowthLaw::Linear { m0 } => GrowthField::LinearInV {
                m0,
                profile: self.profile(),
            },
        }
    }

    /// Δψ = ψ₂ − ψ₁
    fn drive_difference(&self) -> TimeSignal {
        self.psi2.sub(&self.psi1)
    }

    pub fn chemotaxis_field(&self) -> ChemotaxisField {
        let k = self.k();
        match self.regime {
            Regime::WeakConsumption => {
                ChemotaxisField::linear(TimeSignal::constant(0.0), self.drive_difference().scale(k))
            }
            Regime::HighNutrient => ChemotaxisField::linear(
                TimeSignal::constant(k * self.lambda),
                self.drive_difference()
                    .scale(k)
                    .add(&TimeSignal::constant(-0.5 * k * self.lambda)),
            ),
            Regime::LowNutrientGradient => ChemotaxisField::separable(
                SpaceFn::CoshProfile {
                    k: k * self.scale(),
                    lambda: self.lambda,
                },
                self.psi2.clone(),
            ),
            Regime::LowNutrientSymmetric => ChemotaxisField::separable(
                SpaceFn::SinhProfile {
                    k: k * self.scale(),
                    lambda: self.lambda,
                },
                self.psi2.clone(),
            ),
        }
    }

    /// Transport problem for the cell density with α = k v_x, β = m(v) and
    /// D = Π₁.
    pub fn build_transport_problem(&self) -> Result<ProblemSpec> {
        self.validate()?;
        Ok(ProblemSpec {
            domain: SpatialDomain {
                length: 1.0,
                cells: self.cells,
            },
            diffusion: self.pi1,
            alpha: self.chemotaxis_field(),
            beta: self.growth_field(),
            u0: self.u0.clone(),
            t_end: self.t_end,
        })
    }

    pub fn characteristics(&self) -> Result<CharacteristicSolution> {
        CharacteristicSolution::new(self.build_transport_problem()?)
    }

    /// x*(t) from the regime's closed form.
    pub fn closed_form_front(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain("t", t, "[0, inf)"));
        }
        let k = self.k();
        match self.regime {
            Regime::WeakConsumption => Ok(k * self.drive_difference().cumulative(t)),
            Regime::HighNutrient => {
                let rate = k * self.lambda;
                let diff = self.drive_difference();
                let weighted = match diff.exp_weighted_integral(rate, t) {
                    Some(v) => v,
                    None => quad::integrate(|eta| diff.eval(eta) * (-rate * eta).exp(), 0.0, t, 1e-13, 1e-15)?,
                };
                let grow = (rate * t).exp();
                Ok(-0.5 * (rate * t).exp_m1() + k * grow * weighted)
            }
            Regime::LowNutrientGradient => {
                let half_angle = |tt: f64| 0.5 * k * self.scale() * self.lambda * self.psi2.cumulative(tt);
                let exits = |tt: f64| {
                    let theta = half_angle(tt);
                    theta.abs() >= std::f64::consts::FRAC_PI_4
                };
                let s = half_angle(t).tan();
                if exits(t) {
                    let fails = |tt: f64| if exits(tt) { 1.0 } else { -1.0 };
                    let critical_time = bisect(fails, 0.0, t, 1e-13 * t.max(1.0));
                    return Err(Error::FrontBlowup {
                        critical_time,
                        label: 0.0,
                    });
                }
                Ok(((1.0 + s) / (1.0 - s)).ln() / self.lambda.sqrt())
            }
            Regime::LowNutrientSymmetric => Ok(0.0),
        }
    }

    /// Closed-form small-u₀ density. Falls back to the characteristic
    /// quadrature when the regime has no closed form for these drives or
    /// growth law.
    pub fn closed_form_density(&self, t: f64, x: f64) -> Result<f64> {
        let front = self.closed_form_front(t)?;
        if x < front {
            return Ok(0.0);
        }
        match self.closed_form_exponent(t, x, front)? {
            Some(e) => Ok(self.u0.value(0.0) * e.exp()),
            None => self.characteristics()?.outer_density(t, x),
        }
    }

    /// Whether [`closed_form_density`](Self::closed_form_density) uses a
    /// closed form (rather than quadrature) for this scenario.
    pub fn has_closed_density(&self) -> bool {
        self.closed_form_exponent(self.t_end, 1.0, 0.0)
            .map(|e| e.is_some())
            .unwrap_or(false)
    }

    fn closed_form_exponent(&self, t: f64, x: f64, front: f64) -> Result<Option<f64>> {
        let m0 = match (self.m, &self.u0) {
            (GrowthLaw::Linear { m0 }, InitialProfile::Uniform { value }) if *value <= 0.1 => m0,
            _ => return Ok(None),
        };
        let k = self.k();
        let no_left_drive = self.psi1.as_constant() == Some(0.0);
        match self.regime {
            Regime::WeakConsumption if no_left_drive && k > 0.0 => Ok(Some(m0 / k * front * (x - 0.5 * front))),
            Regime::HighNutrient if no_left_drive => {
                let lam = self.lambda;
                let y = x - front;
                let e = if self.psi2.as_constant() == Some(1.0) {
                    -k * lam * t
                        + 0.5 * lam * m0 * t * y * y
                        + m0 * (t - 0.5 * lam * t) * y
                        + 0.5 * k * m0 * t * t
                        + lam * (k * k * m0 * t.powi(3) / 3.0 - 0.5 * k * m0 * t * t)
                } else if self.psi2 == TimeSignal::ramp(1.0) {
                    -k * lam * t
                        + 0.5 * lam * m0 * t * y * y
                        + m0 * (0.5 * t * t - 0.5 * lam * t) * y
                        + k * m0 * t.powi(4) / 8.0
                        + lam * (7.0 * k * k * m0 * t.powi(5) / 120.0 - 0.25 * k * m0 * t.powi(3))
                } else {
                    return Ok(None);
                };
                Ok(Some(e))
            }
            Regime::LowNutrientGradient | Regime::LowNutrientSymmetric => {
                let cs = self.characteristics()?;
                let Some(label) = cs.map_backward(t, x)? else {
                    return Ok(Some(f64::NEG_INFINITY));
                };
                let r = self.lambda.sqrt();
                let power = (m0 - k * self.lambda) / (k * self.lambda);
                let ratio = if self.regime == Regime::LowNutrientGradient {
                    (r * x).cosh() / (r * label).cosh()
                } else {
                    (r * x).sinh() / (r * label).sinh()
                };
                Ok(Some(power * ratio.ln()))
            }
            _ => Ok(None),
        }
    }
}
