//! Simulation of a flux qubit coupled to the quantized motion of a magnetized
//! nanomechanical cantilever.
//!
//! The crate is organised bottom-up:
//!
//! * [`quantum`] – truncated qubit ⊗ Fock operators, states and the Lindblad dissipator.
//! * [`model`] – physical parameter chain and assembly of Lindblad models in the
//!   lab, rotating, effective-squeeze and squeezed frames.
//! * [`solver`] – density-matrix integration, quantum-jump trajectories and
//!   steady-state extraction.
//! * [`reduced`] – adiabatic-elimination phonon models and closed-form predictions.
//! * [`observables`] – mean phonon number, qubit excitation, coherent variance, fidelity.
//! * [`scenario`] – JSON scenarios, figure presets, sweeps and CSV/JSON output.
//!
//! All frequencies and rates are angular (rad/s) unless a name says otherwise.

pub mod error;
pub mod model;
pub mod observables;
pub mod quantum;
pub mod reduced;
pub mod scenario;
pub mod solver;
pub mod units;

pub use error::{Error, Result};
pub use model::{
    CantileverGeometry, DerivedParams, DriveParams, Frame, LindbladModel, QubitParams,
    TipCoupling, ValidityReport,
};
pub use observables::ObservableSet;
pub use quantum::{Operator, QuantumState, SpaceDescriptor};
pub use reduced::{AdiabaticRates, SqueezeParams};
pub use solver::{EvolutionResult, Integrator, SolverOptions, TrajectoryConfig};
