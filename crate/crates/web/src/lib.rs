//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a flat `Float64Array`; the page slices it by the
//! lengths documented on each function.

use chemowave::layer::CompositeSolution;
use chemowave::oscillatory::{OscillatorySpec, Regime};
use chemowave::pde::{solve_cell_pde, SolverConfig};
use chemowave::{
    CharacteristicSolution, ChemotaxisField, GrowthField, InitialProfile, ProblemSpec, SpatialDomain, TimeSignal,
};
use wasm_bindgen::prelude::*;

fn linear_problem(a: f64, b: f64, omega: f64, diffusion: f64, u0: f64, t_end: f64, cells: usize) -> ProblemSpec {
    let signal = |v: f64| {
        if omega > 0.0 {
            TimeSignal::cosine(v, omega, 0.0)
        } else {
            TimeSignal::constant(v)
        }
    };
    ProblemSpec {
        domain: SpatialDomain { length: 1.0, cells },
        diffusion,
        alpha: ChemotaxisField::linear(signal(a), signal(b)),
        beta: GrowthField::constant(1.0),
        u0: InitialProfile::uniform(u0),
        t_end,
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `samples` pairs (t, x*) for α = (a x + b)·g(t), with g = cos(ωt) when
/// ω > 0 and g = 1 otherwise. The trajectory stops early if the front
/// leaves the domain.
pub fn front_samples(a: f64, b: f64, omega: f64, t_end: f64, samples: usize) -> Result<Vec<f64>, String> {
    let spec = linear_problem(a, b, omega, 1e-3, 0.05, t_end, 64);
    spec.validate().map_err(err)?;
    let chars = CharacteristicSolution::new(spec).map_err(err)?;
    let times: Vec<f64> = (0..samples.max(2))
        .map(|i| t_end * i as f64 / (samples.max(2) - 1) as f64)
        .collect();
    let tr = chars.front_trajectory(&times).map_err(err)?;
    Ok(tr.times.iter().zip(&tr.positions).flat_map(|(&t, &x)| [t, x]).collect())
}

/// Numeric and composite densities at time `t` on `cells` cell centres:
/// `[x; cells] ++ [u_numeric; cells] ++ [u_composite; cells] ++ [x*]`.
pub fn profiles(a: f64, b: f64, omega: f64, diffusion: f64, t: f64, cells: usize) -> Result<Vec<f64>, String> {
    let spec = linear_problem(a, b, omega, diffusion, 0.05, t, cells);
    spec.validate().map_err(err)?;
    let sol = solve_cell_pde(&spec, &SolverConfig::default(), &[t]).map_err(err)?;
    let composite = CompositeSolution::from_outer(CharacteristicSolution::new(spec).map_err(err)?);
    let xs = sol.grid.centers();
    let analytic = composite.profile(t, &xs).map_err(err)?;
    let front = composite.outer().front_position(t).map_err(err)?;
    let mut out = xs;
    out.extend_from_slice(&sol.u[0]);
    out.extend(analytic);
    out.push(front);
    Ok(out)
}

/// Reciprocal density r(t) for r′ + (β − a cos ωt) r = β:
/// `[t; n] ++ [reference; n] ++ [slow; n] ++ [fast; n] ++ [chemotaxis; n] ++ [growth; n] ++ [selected]`,
/// where an approximation that does not apply is NaN and `selected` indexes
/// the regime chosen by the smallest parameter (0 slow … 3 growth).
pub fn regimes(a: f64, beta: f64, omega: f64, r_star: f64, t_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    let spec = OscillatorySpec::new(a, beta, omega, r_star).map_err(err)?;
    let n = samples.max(2);
    let times: Vec<f64> = (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect();
    let mut out = times.clone();
    out.extend(spec.r_reference_many(&times).map_err(err)?);
    for regime in Regime::ALL {
        out.extend(times.iter().map(|&t| spec.approximation(regime, t).unwrap_or(f64::NAN)));
    }
    let (selected, _) = spec.regime_select();
    out.push(Regime::ALL.iter().position(|&r| r == selected).unwrap_or(0) as f64);
    Ok(out)
}

#[wasm_bindgen]
pub fn front_trajectory(a: f64, b: f64, omega: f64, t_end: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    front_samples(a, b, omega, t_end, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn density_profiles(a: f64, b: f64, omega: f64, diffusion: f64, t: f64, cells: usize) -> Result<Vec<f64>, JsError> {
    profiles(a, b, omega, diffusion, t, cells).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn oscillatory_regimes(
    a: f64,
    beta: f64,
    omega: f64,
    r_star: f64,
    t_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    regimes(a, beta, omega, r_star, t_max, samples).map_err(|e| JsError::new(&e))
}
