//! Chemotaxis waves in heterogeneous chemoattractant fields: characteristic
//! maps and fronts, inner and composite layers, oscillatory asymptotics,
//! microdevice reductions, and a finite-volume reference solver to check
//! them against.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::too_many_arguments,
    clippy::needless_range_loop
)]

pub mod characteristics;
pub mod error;
pub mod field;
pub mod harness;
pub mod layer;
pub mod microdevice;
pub mod numerics;
pub mod oscillatory;
pub mod pde;
pub mod problem;
pub mod signal;

pub use characteristics::{CharacteristicSolution, FrontTrajectory};
pub use error::{Error, Result};
pub use field::{ChemoProfile, ChemotaxisField, Family, GrowthField, InitialProfile, SpaceFn};
pub use pde::GridSolution;
pub use problem::{ProblemSpec, SpatialDomain, SpecReport, Violation};
pub use signal::TimeSignal;
