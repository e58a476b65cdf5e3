mod cell;
mod coupled;
mod decay;
mod grid;

pub use cell::{solve_cell_pde, Integrator, Limiter, SolverConfig};
pub use coupled::{solve_coupled, solve_coupled_from};
pub use decay::{mode_history, transient_decay_check, DecayCase, DecayInit, DecayReport, ModeFit, AMPLITUDE_FLOOR};
pub use grid::{Diagnostics, Grid, GridSolution};
