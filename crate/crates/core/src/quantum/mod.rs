//! Truncated-Hilbert-space linear algebra for a qubit ⊗ oscillator system.
//!
//! Composite spaces are always ordered qubit ⊗ oscillator: the basis index of
//! `|q⟩|n⟩` is `q·(N_max+1) + n` with `|g⟩ = 0` and `|e⟩ = 1`.

mod dissipator;
mod operator;
pub mod sparse;
mod space;
mod state;

pub use dissipator::{apply_dissipator, cross_dissipator_matrix, dissipator_matrix};
pub use operator::{
    fock_annihilation, fock_creation, kron, number_operator, quadrature_x, qubit_operator,
    squeeze_edge_amplitude, squeeze_operator, tensor, Operator, QubitOp,
};
pub use space::{Factors, SpaceDescriptor, EXCITED, GROUND};
pub(crate) use state::hermitian_min_eigenvalue;
pub use state::{thermal_state, thermal_tail_weight, QuantumState, StateKind};

pub type C64 = num_complex::Complex64;

/// Tolerance on `‖A − A†‖_max` for an operator to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
