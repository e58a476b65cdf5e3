//! Scalar drive signals of time: the temporal factor g(t) of a separable
//! chemotactic field, the coefficients a(t), b(t) of a field linear in x, and
//! the boundary drives of a microdevice.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeSignal {
    Constant {
        value: f64,
    },
    /// `amplitude * cos(omega t) + offset`
    Cosine {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `rate * t`
    Ramp {
        rate: f64,
    },
    /// Piecewise-linear interpolation of tabulated values, held constant
    /// outside the knot range.
    Sampled {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
    /// Pointwise sum of the terms.
    Sum {
        terms: Vec<TimeSignal>,
    },
}

impl Default for TimeSignal {
    fn default() -> Self {
        TimeSignal::Constant { value: 1.0 }
    }
}

impl TimeSignal {
    pub fn constant(value: f64) -> Self {
        TimeSignal::Constant { value }
    }

    pub fn cosine(amplitude: f64, omega: f64, offset: f64) -> Self {
        TimeSignal::Cosine {
            amplitude,
            omega,
            offset,
        }
    }

    pub fn ramp(rate: f64) -> Self {
        TimeSignal::Ramp { rate }
    }

    pub fn sampled(knots: Vec<f64>, values: Vec<f64>) -> Self {
        TimeSignal::Sampled { knots, values }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeSignal::Constant { value } => *value,
            TimeSignal::Cosine {
                amplitude,
                omega,
                offset,
            } => amplitude * (omega * t).cos() + offset,
            TimeSignal::Ramp { rate } => rate * t,
            TimeSignal::Sampled { knots, values } => interp_linear(knots, values, t),
            TimeSignal::Sum { terms } => terms.iter().map(|s| s.eval(t)).sum(),
        }
    }

    /// ∫₀ᵗ g(η) dη. Exact for every variant (piecewise-linear data integrate
    /// exactly with the trapezoid rule). Negative `t` gives the signed integral.
    pub fn cumulative(&self, t: f64) -> f64 {
        match self {
            TimeSignal::Constant { value } => value * t,
            TimeSignal::Cosine {
                amplitude,
                omega,
                offset,
            } => {
                if *omega == 0.0 {
                    (amplitude + offset) * t
                } else {
                    amplitude * (omega * t).sin() / omega + offset * t
                }
            }
            TimeSignal::Ramp { rate } => 0.5 * rate * t * t,
            TimeSignal::Sampled { knots, values } => {
                sampled_antiderivative(knots, values, t) - sampled_antiderivative(knots, values, 0.0)
            }
            TimeSignal::Sum { terms } => terms.iter().map(|s| s.cumulative(t)).sum(),
        }
    }

    /// ∫₀ᵗ g(η) e^{-rate η} dη when an elementary closed form exists.
    pub fn exp_weighted_integral(&self, rate: f64, t: f64) -> Option<f64> {
        let small = (rate * t).abs() < 1e-4;
        match self {
            TimeSignal::Constant { value } => Some(value * expm1_ratio(rate, t)),
            TimeSignal::Cosine {
                amplitude,
                omega,
                offset,
            } => {
                let w = *omega;
                let osc = if rate == 0.0 && w == 0.0 {
                    t
                } else {
                    let e = (-rate * t).exp();
                    (e * (w * (w * t).sin() - rate * (w * t).cos()) + rate) / (rate * rate + w * w)
                };
                Some(amplitude * osc + offset * expm1_ratio(rate, t))
            }
            TimeSignal::Ramp { rate: r } => {
                let v = if small {
                    let at = rate * t;
                    t * t * (0.5 - at / 3.0 + at * at / 8.0 - at * at * at / 30.0)
                } else {
                    (1.0 - (-rate * t).exp() * (1.0 + rate * t)) / (rate * rate)
                };
                Some(r * v)
            }
            TimeSignal::Sampled { .. } => None,
            TimeSignal::Sum { terms } => terms.iter().map(|s| s.exp_weighted_integral(rate, t)).sum(),
        }
    }

    /// Whether g(-t) = g(t) holds by construction.
    pub fn is_even(&self) -> bool {
        match self {
            TimeSignal::Constant { .. } | TimeSignal::Cosine { .. } => true,
            TimeSignal::Ramp { rate } => *rate == 0.0,
            TimeSignal::Sampled { .. } => false,
            TimeSignal::Sum { terms } => terms.iter().all(TimeSignal::is_even),
        }
    }

    /// The constant value, if the signal is identically constant.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            TimeSignal::Constant { value } => Some(*value),
            TimeSignal::Cosine {
                amplitude,
                omega,
                offset,
            } if *omega == 0.0 => Some(amplitude + offset),
            TimeSignal::Cosine { amplitude, offset, .. } if *amplitude == 0.0 => Some(*offset),
            TimeSignal::Ramp { rate } if *rate == 0.0 => Some(0.0),
            TimeSignal::Sum { terms } => terms.iter().map(TimeSignal::as_constant).sum(),
            _ => None,
        }
    }

    pub fn scale(&self, k: f64) -> TimeSignal {
        match self {
            TimeSignal::Constant { value } => TimeSignal::constant(k * value),
            TimeSignal::Cosine {
                amplitude,
                omega,
                offset,
            } => TimeSignal::cosine(k * amplitude, *omega, k * offset),
            TimeSignal::Ramp { rate } => TimeSignal::ramp(k * rate),
            TimeSignal::Sampled { knots, values } => {
                TimeSignal::sampled(knots.clone(), values.iter().map(|v| k * v).collect())
            }
            TimeSignal::Sum { terms } => TimeSignal::Sum {
                terms: terms.iter().map(|s| s.scale(k)).collect(),
            },
        }
    }

    /// Pointwise sum, folding constants into constant-carrying variants.
    pub fn add(&self, other: &TimeSignal) -> TimeSignal {
        use TimeSignal::*;
        match (self, other) {
            (Constant { value: a }, Constant { value: b }) => TimeSignal::constant(a + b),
            (
                Constant { value: c },
                Cosine {
                    amplitude,
                    omega,
                    offset,
                },
            )
            | (
                Cosine {
                    amplitude,
                    omega,
                    offset,
                },
                Constant { value: c },
            ) => TimeSignal::cosine(*amplitude, *omega, offset + c),
            (Constant { value }, s) | (s, Constant { value }) if *value == 0.0 => s.clone(),
            _ => {
                let mut terms = Vec::new();
                for s in [self, other] {
                    match s {
                        Sum { terms: inner } => terms.extend(inner.iter().cloned()),
                        s => terms.push(s.clone()),
                    }
                }
                Sum { terms }
            }
        }
    }

    pub fn sub(&self, other: &TimeSignal) -> TimeSignal {
        self.add(&other.scale(-1.0))
    }

    /// Returns a description of the first broken invariant, if any.
    pub fn check(&self) -> Option<String> {
        match self {
            TimeSignal::Constant { value } if !value.is_finite() => Some("non-finite constant".into()),
            TimeSignal::Cosine {
                amplitude,
                omega,
                offset,
            } if !(amplitude.is_finite() && omega.is_finite() && offset.is_finite()) => {
                Some("non-finite cosine parameter".into())
            }
            TimeSignal::Ramp { rate } if !rate.is_finite() => Some("non-finite ramp rate".into()),
            TimeSignal::Sampled { knots, values } => {
                if knots.is_empty() || knots.len() != values.len() {
                    Some("sampled signal needs equally many knots and values (at least one)".into())
                } else if knots.windows(2).any(|w| !(w[1] > w[0])) {
                    Some("sampled knots must be strictly increasing".into())
                } else if knots.iter().chain(values).any(|v| !v.is_finite()) {
                    Some("non-finite sample".into())
                } else {
                    None
                }
            }
            TimeSignal::Sum { terms } => terms.iter().find_map(TimeSignal::check),
            _ => None,
        }
    }
}

/// (1 - e^{-r t}) / r, continuous at r = 0.
fn expm1_ratio(r: f64, t: f64) -> f64 {
    if r == 0.0 {
        t
    } else {
        -(-r * t).exp_m1() / r
    }
}

pub(crate) fn interp_linear(knots: &[f64], values: &[f64], t: f64) -> f64 {
    let n = knots.len();
    if t <= knots[0] {
        return values[0];
    }
    if t >= knots[n - 1] {
        return values[n - 1];
    }
    let j = knots.partition_point(|&k| k <= t) - 1;
    let w = (t - knots[j]) / (knots[j + 1] - knots[j]);
    values[j] + w * (values[j + 1] - values[j])
}

/// ∫_{knots[0]}^t of the interpolant.
fn sampled_antiderivative(knots: &[f64], values: &[f64], t: f64) -> f64 {
    let n = knots.len();
    if t <= knots[0] {
        return values[0] * (t - knots[0]);
    }
    let mut acc = 0.0;
    for j in 0..n - 1 {
        let (k0, k1) = (knots[j], knots[j + 1]);
        if t >= k1 {
            acc += 0.5 * (values[j] + values[j + 1]) * (k1 - k0);
        } else {
            let vt = interp_linear(knots, values, t);
            return acc + 0.5 * (values[j] + vt) * (t - k0);
        }
    }
    acc + values[n - 1] * (t - knots[n - 1])
}
