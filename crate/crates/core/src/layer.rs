//! The erf transition layer around the front and the composite density that
//! joins it to the outer solution.

use crate::characteristics::CharacteristicSolution;
use crate::error::{Error, Result};

/// ½(1 + erf(X / (2√τ))): the unit step smoothed by diffusion over a layer
/// time τ.
pub fn inner_profile(x: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::domain("tau", tau, "(0, inf)"));
    }
    Ok(0.5 * (1.0 + libm::erf(x / (2.0 * tau.sqrt()))))
}

#[derive(Debug, Clone)]
pub struct CompositeSolution {
    outer: CharacteristicSolution,
    diffusion: f64,
}

impl CompositeSolution {
    pub fn new(outer: CharacteristicSolution, diffusion: f64) -> Self {
        CompositeSolution { outer, diffusion }
    }

    /// Uses the diffusion stored in the problem spec.
    pub fn from_outer(outer: CharacteristicSolution) -> Self {
        let d = outer.spec().diffusion;
        CompositeSolution::new(outer, d)
    }

    pub fn outer(&self) -> &CharacteristicSolution {
        &self.outer
    }

    pub fn diffusion(&self) -> f64 {
        self.diffusion
    }

    /// Layer half-width scale √(D t).
    pub fn layer_scale(&self, t: f64) -> f64 {
        (self.diffusion * t).sqrt()
    }

    pub fn density(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.profile(t, &[x])?[0])
    }

    /// Composite density at several positions sharing one time; the front and
    /// its plateau value are computed once.
    pub fn profile(&self, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        if !(t > 0.0) {
            return Err(Error::domain("t", t, "(0, t_end]"));
        }
        let front = self.outer.front_position(t)?;
        let at_front = self.outer.density_on_label(t, 0.0)?;
        let width = 2.0 * self.layer_scale(t);
        xs.iter()
            .map(|&x| {
                let outer = self.outer.outer_density(t, x)?;
                let e = if width > 0.0 {
                    libm::erf((x - front) / width)
                } else if x == front {
                    0.0
                } else {
                    (x - front).signum()
                };
                Ok(if x < front {
                    0.5 * at_front * (e + 1.0)
                } else {
                    0.5 * at_front * (e - 1.0) + outer
                })
            })
            .collect()
    }

    /// Left and right limits of the composite at x*(t).
    pub fn limits_at_front(&self, t: f64) -> Result<(f64, f64)> {
        let at_front = self.outer.density_on_label(t, 0.0)?;
        let front = self.outer.front_position(t)?;
        let right = if (0.0..=self.outer.spec().domain.length).contains(&front) {
            self.outer.outer_density(t, front)?
        } else {
            at_front
        };
        Ok((0.5 * at_front, -0.5 * at_front + right))
    }
}
