//! Chemotactic velocity fields α(t, x), growth fields β(t, x) and initial
//! densities.

use serde::{Deserialize, Serialize};

use crate::signal::{interp_linear, TimeSignal};

/// Spatial factor f(x) of a separable field α = f(x) g(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceFn {
    /// a x + b
    Affine { a: f64, b: f64 },
    /// a x² + b x + c
    Quadratic { a: f64, b: f64, c: f64 },
    /// a e^{-λx} + b e^{λx}
    Exponential { a: f64, b: f64, lambda: f64 },
    /// k √λ cosh(√λ x)
    CoshProfile { k: f64, lambda: f64 },
    /// k √λ sinh(√λ x)
    SinhProfile { k: f64, lambda: f64 },
    /// Piecewise-linear table, held constant outside the knots.
    Numeric { knots: Vec<f64>, values: Vec<f64> },
}

/// Closed-form family used to dispatch characteristic maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    LinearInX,
    Affine,
    QuadraticDegenerate,
    QuadraticComplex,
    QuadraticReal,
    Exponential,
    CoshProfile,
    SinhProfile,
    NumericFallback,
}

impl Family {
    pub fn is_closed_form(self) -> bool {
        self != Family::NumericFallback
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::LinearInX => "linear_in_x",
            Family::Affine => "affine",
            Family::QuadraticDegenerate => "quadratic_degenerate",
            Family::QuadraticComplex => "quadratic_complex",
            Family::QuadraticReal => "quadratic_real",
            Family::Exponential => "exponential",
            Family::CoshProfile => "cosh_profile",
            Family::SinhProfile => "sinh_profile",
            Family::NumericFallback => "numeric_fallback",
        }
    }
}

impl SpaceFn {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            SpaceFn::Affine { a, b } => a * x + b,
            SpaceFn::Quadratic { a, b, c } => (a * x + b) * x + c,
            SpaceFn::Exponential { a, b, lambda } => a * (-lambda * x).exp() + b * (lambda * x).exp(),
            SpaceFn::CoshProfile { k, lambda } => {
                let r = lambda.sqrt();
                k * r * (r * x).cosh()
            }
            SpaceFn::SinhProfile { k, lambda } => {
                let r = lambda.sqrt();
                k * r * (r * x).sinh()
            }
            SpaceFn::Numeric { knots, values } => interp_linear(knots, values, x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            SpaceFn::Affine { a, .. } => *a,
            SpaceFn::Quadratic { a, b, .. } => 2.0 * a * x + b,
            SpaceFn::Exponential { a, b, lambda } => lambda * (b * (lambda * x).exp() - a * (-lambda * x).exp()),
            SpaceFn::CoshProfile { k, lambda } => k * lambda * (lambda.sqrt() * x).sinh(),
            SpaceFn::SinhProfile { k, lambda } => k * lambda * (lambda.sqrt() * x).cosh(),
            SpaceFn::Numeric { knots, .. } => {
                let span = knots[knots.len() - 1] - knots[0];
                let h = if span > 0.0 { span * 1e-4 } else { 1e-4 };
                (self.value(x + h) - self.value(x - h)) / (2.0 * h)
            }
        }
    }

    /// Discriminant b² − 4ac of the quadratic family, if this is one.
    pub fn discriminant(&self) -> Option<f64> {
        match self {
            SpaceFn::Quadratic { a, b, c } => Some(b * b - 4.0 * a * c),
            _ => None,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            SpaceFn::Affine { .. } => Family::Affine,
            SpaceFn::Quadratic { a, b, c } => {
                if *a == 0.0 {
                    return Family::Affine;
                }
                let d = b * b - 4.0 * a * c;
                if d.abs() <= 1e-14 * (b * b + (4.0 * a * c).abs()) {
                    Family::QuadraticDegenerate
                } else if d < 0.0 {
                    Family::QuadraticComplex
                } else {
                    Family::QuadraticReal
                }
            }
            SpaceFn::Exponential { .. } => Family::Exponential,
            SpaceFn::CoshProfile { .. } => Family::CoshProfile,
            SpaceFn::SinhProfile { .. } => Family::SinhProfile,
            SpaceFn::Numeric { .. } => Family::NumericFallback,
        }
    }

    pub(crate) fn check(&self) -> Option<String> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            SpaceFn::Affine { a, b } if !finite(&[*a, *b]) => Some("non-finite coefficient".into()),
            SpaceFn::Quadratic { a, b, c } if !finite(&[*a, *b, *c]) => Some("non-finite coefficient".into()),
            SpaceFn::Exponential { a, b, lambda } => {
                if !finite(&[*a, *b, *lambda]) {
                    Some("non-finite coefficient".into())
                } else if *lambda == 0.0 {
                    Some("exponential rate lambda must be nonzero".into())
                } else {
                    None
                }
            }
            SpaceFn::CoshProfile { k, lambda } | SpaceFn::SinhProfile { k, lambda } => {
                if !finite(&[*k, *lambda]) {
                    Some("non-finite coefficient".into())
                } else if *lambda <= 0.0 {
                    Some("lambda must be positive".into())
                } else {
                    None
                }
            }
            SpaceFn::Numeric { knots, values } => TimeSignal::sampled(knots.clone(), values.clone())
                .check()
                .map(|m| m.replace("sampled", "numeric")),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChemotaxisField {
    /// α = a(t) x + b(t)
    LinearInX { a: TimeSignal, b: TimeSignal },
    /// α = f(x) g(t)
    Separable { f: SpaceFn, g: TimeSignal },
}

impl ChemotaxisField {
    pub fn linear(a: TimeSignal, b: TimeSignal) -> Self {
        ChemotaxisField::LinearInX { a, b }
    }

    pub fn separable(f: SpaceFn, g: TimeSignal) -> Self {
        ChemotaxisField::Separable { f, g }
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        match self {
            ChemotaxisField::LinearInX { a, b } => a.eval(t) * x + b.eval(t),
            ChemotaxisField::Separable { f, g } => f.value(x) * g.eval(t),
        }
    }

    /// ∂α/∂x
    pub fn derivative(&self, t: f64, x: f64) -> f64 {
        match self {
            ChemotaxisField::LinearInX { a, .. } => a.eval(t),
            ChemotaxisField::Separable { f, g } => f.derivative(x) * g.eval(t),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            ChemotaxisField::LinearInX { .. } => Family::LinearInX,
            ChemotaxisField::Separable { f, .. } => f.family(),
        }
    }

    /// max |α| over a sample of [t0, t1] × [0, L].
    pub fn max_speed(&self, t0: f64, t1: f64, length: f64) -> f64 {
        let mut m = 0.0f64;
        for i in 0..=16 {
            let t = t0 + (t1 - t0) * i as f64 / 16.0;
            for j in 0..=64 {
                let x = length * j as f64 / 64.0;
                m = m.max(self.value(t, x).abs());
            }
        }
        m
    }
}

/// Chemoattractant profile v(t, x) entering a growth law m(v).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChemoProfile {
    /// (ψ₂ − ψ₁) x + ψ₁
    Linear { psi1: TimeSignal, psi2: TimeSignal },
    /// ½λx² + (ψ₂ − ψ₁ − ½λ) x + ψ₁
    Quadratic {
        lambda: f64,
        psi1: TimeSignal,
        psi2: TimeSignal,
    },
    /// scale · ψ sinh(√λ x)
    Sinh { lambda: f64, psi: TimeSignal, scale: f64 },
    /// scale · ψ cosh(√λ x)
    Cosh { lambda: f64, psi: TimeSignal, scale: f64 },
}

impl ChemoProfile {
    pub fn value(&self, t: f64, x: f64) -> f64 {
        match self {
            ChemoProfile::Linear { psi1, psi2 } => {
                let p1 = psi1.eval(t);
                (psi2.eval(t) - p1) * x + p1
            }
            ChemoProfile::Quadratic { lambda, psi1, psi2 } => {
                let p1 = psi1.eval(t);
                0.5 * lambda * x * x + (psi2.eval(t) - p1 - 0.5 * lambda) * x + p1
            }
            ChemoProfile::Sinh { lambda, psi, scale } => scale * psi.eval(t) * (lambda.sqrt() * x).sinh(),
            ChemoProfile::Cosh { lambda, psi, scale } => scale * psi.eval(t) * (lambda.sqrt() * x).cosh(),
        }
    }

    /// ∂v/∂x
    pub fn gradient(&self, t: f64, x: f64) -> f64 {
        match self {
            ChemoProfile::Linear { psi1, psi2 } => psi2.eval(t) - psi1.eval(t),
            ChemoProfile::Quadratic { lambda, psi1, psi2 } => lambda * x + psi2.eval(t) - psi1.eval(t) - 0.5 * lambda,
            ChemoProfile::Sinh { lambda, psi, scale } => {
                let r = lambda.sqrt();
                scale * psi.eval(t) * r * (r * x).cosh()
            }
            ChemoProfile::Cosh { lambda, psi, scale } => {
                let r = lambda.sqrt();
                scale * psi.eval(t) * r * (r * x).sinh()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthField {
    Constant {
        value: f64,
    },
    /// β = m₀ v(t, x)
    LinearInV {
        m0: f64,
        profile: ChemoProfile,
    },
    /// Time-independent table in x, piecewise-linear.
    Numeric {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Default for GrowthField {
    fn default() -> Self {
        GrowthField::Constant { value: 1.0 }
    }
}

impl GrowthField {
    pub fn constant(value: f64) -> Self {
        GrowthField::Constant { value }
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        match self {
            GrowthField::Constant { value } => *value,
            GrowthField::LinearInV { m0, profile } => m0 * profile.value(t, x),
            GrowthField::Numeric { knots, values } => interp_linear(knots, values, x),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            GrowthField::Constant { value } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    Uniform {
        value: f64,
    },
    /// Piecewise-linear table in x.
    Sampled {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Default for InitialProfile {
    fn default() -> Self {
        InitialProfile::Uniform { value: 0.05 }
    }
}

impl InitialProfile {
    pub fn uniform(value: f64) -> Self {
        InitialProfile::Uniform { value }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            InitialProfile::Uniform { value } => *value,
            InitialProfile::Sampled { knots, values } => interp_linear(knots, values, x),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            InitialProfile::Uniform { value } => *value,
            InitialProfile::Sampled { values, .. } => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            InitialProfile::Uniform { value } => *value,
            InitialProfile::Sampled { values, .. } => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Whether the O(u₀²) shortcut formulas apply.
    pub fn is_small(&self) -> bool {
        self.max() <= 0.1
    }

    pub fn scaled(&self, k: f64) -> Self {
        match self {
            InitialProfile::Uniform { value } => InitialProfile::uniform(k * value),
            InitialProfile::Sampled { knots, values } => InitialProfile::Sampled {
                knots: knots.clone(),
                values: values.iter().map(|v| k * v).collect(),
            },
        }
    }
}
