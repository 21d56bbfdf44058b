//! Propagation of [`LindbladModel`](crate::model::LindbladModel)s.

mod banded;
mod generator;
mod master;
mod options;
mod result;
mod steady;
mod trajectory;

pub use master::evolve_master;
pub use options::{Integrator, SolverOptions, TrajectoryConfig};
pub use result::{Diagnostics, EvolutionResult, StdErrors};
pub use steady::{steady_state, steady_state_report, Sector, SteadyMethod, SteadyReport, STEADY_RESIDUAL_TOL};
pub use trajectory::evolve_trajectories;
