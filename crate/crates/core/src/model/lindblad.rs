//! The simulable object: a Hamiltonian, optional harmonic drives and
//! dissipative channels on one space.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{cross_dissipator_matrix, dissipator_matrix, Operator, SpaceDescriptor, C64, HERMITIAN_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Lab,
    RotatingJc,
    RotatingFull,
    EffectiveSqueeze,
    SqueezedFrame,
    /// Oscillator-only model left after eliminating the qubit.
    AdiabaticReduced,
}

/// Time-dependent Hamiltonian term `c·A·e^{iωt} + H.c.`.
#[derive(Clone, Debug)]
pub struct Drive {
    pub op: Operator,
    pub amplitude: C64,
    pub frequency: f64,
}

impl Drive {
    pub fn phase_factor(&self, t: f64) -> C64 {
        self.amplitude * C64::from_polar(1.0, self.frequency * t)
    }

    pub fn at(&self, t: f64) -> Operator {
        let term = self.op.scale(self.phase_factor(t));
        &term + &term.adjoint()
    }
}

#[derive(Clone, Debug)]
pub enum Dissipator {
    /// `D[A, Ω]` with population rate `Ω ≥ 0`.
    Collapse { op: Operator, rate: f64 },
    /// Off-diagonal channel block, see [`cross_dissipator_matrix`].
    Cross { a: Operator, b: Operator, weight: C64 },
}

impl Dissipator {
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        match self {
            Dissipator::Collapse { op, rate } => dissipator_matrix(op.matrix(), *rate, rho),
            Dissipator::Cross { a, b, weight } => cross_dissipator_matrix(a.matrix(), b.matrix(), *weight, rho),
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Dissipator::Collapse { op, rate } => rate * op_norm(op).powi(2),
            Dissipator::Cross { a, b, weight } => weight.norm() * op_norm(a) * op_norm(b),
        }
    }
}

fn op_norm(op: &Operator) -> f64 {
    // ∞-norm bound, cheap and good enough for step-size heuristics.
    let m = op.matrix();
    (0..m.nrows()).map(|i| m.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Physical parameters a model was assembled from. Transforms and reports
/// read these instead of reverse-engineering the matrices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// JC coupling g, or Θ₁ for a two-sided drive.
    pub coupling: f64,
    /// Θ₂ (anti-JC amplitude of a two-sided drive).
    pub counter_coupling: f64,
    pub qubit_decay: f64,
    pub mech_damping: f64,
    pub thermal_occupation: f64,
    /// Squeeze already applied by a frame change.
    pub zeta: f64,
}

#[derive(Clone, Debug)]
pub struct LindbladModel {
    pub space: SpaceDescriptor,
    pub frame: Frame,
    pub hamiltonian: Operator,
    pub drives: Vec<Drive>,
    pub dissipators: Vec<Dissipator>,
    pub params: ModelParams,
}

impl LindbladModel {
    pub fn new(space: SpaceDescriptor, frame: Frame, hamiltonian: Operator, params: ModelParams) -> Result<Self> {
        space.ensure_same(&hamiltonian.space())?;
        let err = hamiltonian.hermiticity_error();
        if err > HERMITIAN_TOL * (1.0 + op_norm(&hamiltonian)) {
            return Err(Error::invalid(format!("Hamiltonian is not Hermitian (‖H − H†‖ = {err:e})")));
        }
        Ok(Self { space, frame, hamiltonian, drives: Vec::new(), dissipators: Vec::new(), params })
    }

    pub fn with_drive(mut self, op: Operator, amplitude: C64, frequency: f64) -> Result<Self> {
        self.space.ensure_same(&op.space())?;
        self.drives.push(Drive { op, amplitude, frequency });
        Ok(self)
    }

    /// Adds `D[op, rate]`; zero rates are dropped.
    pub fn with_collapse(mut self, op: Operator, rate: f64) -> Result<Self> {
        self.space.ensure_same(&op.space())?;
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::invalid(format!("collapse rate must be finite and ≥ 0, got {rate}")));
        }
        if rate > 0.0 {
            self.dissipators.push(Dissipator::Collapse { op, rate });
        }
        Ok(self)
    }

    pub fn with_cross(mut self, a: Operator, b: Operator, weight: C64) -> Result<Self> {
        self.space.ensure_same(&a.space())?;
        self.space.ensure_same(&b.space())?;
        if weight != C64::new(0.0, 0.0) {
            self.dissipators.push(Dissipator::Cross { a, b, weight });
        }
        Ok(self)
    }

    pub fn is_time_dependent(&self) -> bool {
        !self.drives.is_empty()
    }

    pub fn has_cross_terms(&self) -> bool {
        self.dissipators.iter().any(|d| matches!(d, Dissipator::Cross { .. }))
    }

    pub fn collapse_terms(&self) -> impl Iterator<Item = (&Operator, f64)> {
        self.dissipators.iter().filter_map(|d| match d {
            Dissipator::Collapse { op, rate } => Some((op, *rate)),
            Dissipator::Cross { .. } => None,
        })
    }

    pub fn hamiltonian_at(&self, t: f64) -> Operator {
        self.drives.iter().fold(self.hamiltonian.clone(), |h, d| &h + &d.at(t))
    }

    /// Same coherent part, no dissipators.
    pub fn without_dissipation(&self) -> Self {
        let mut m = self.clone();
        m.dissipators.clear();
        m
    }

    /// Dense evaluation of the generator. Reference implementation for tests;
    /// the solvers use the sparse form.
    pub fn generator_dense(&self, t: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let h = self.hamiltonian_at(t);
        let hm = h.matrix();
        let mut out = (hm * rho - rho * hm) * C64::new(0.0, -1.0);
        for d in &self.dissipators {
            out += d.apply(rho);
        }
        out
    }

    /// Largest frequency or rate appearing in the model, rad/s.
    pub fn rate_scale(&self) -> f64 {
        let mut s = op_norm(&self.hamiltonian);
        for d in &self.drives {
            s = s.max(d.frequency.abs()).max(2.0 * d.amplitude.norm() * op_norm(&d.op));
        }
        for d in &self.dissipators {
            s = s.max(d.scale());
        }
        s
    }
}
