use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::operator::Operator;
use super::space::SpaceDescriptor;
use super::C64;
use crate::error::{Error, Result};

/// Norm tolerance for pure states.
pub const PURE_NORM_TOL: f64 = 1e-10;
/// Trace and positivity tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Clone, Debug, PartialEq)]
enum Payload {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

/// A pure state vector or a density matrix on a truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    space: SpaceDescriptor,
    payload: Payload,
}

impl QuantumState {
    pub fn pure(space: SpaceDescriptor, psi: DVector<C64>) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!("vector of length {} on {space}", psi.len())));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::InvalidState(format!("‖ψ‖ = {norm}")));
        }
        Ok(Self { space, payload: Payload::Pure(psi) })
    }

    /// Normalizes `psi` first.
    pub fn pure_normalized(space: SpaceDescriptor, psi: DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::pure(space, psi / C64::new(norm, 0.0))
    }

    pub fn density(space: SpaceDescriptor, rho: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch(format!("{}x{} density on {space}", rho.nrows(), rho.ncols())));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidState(format!("trace = {tr}")));
        }
        let herm = (&rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > DENSITY_TOL {
            return Err(Error::InvalidState(format!("‖ρ − ρ†‖_max = {herm:e}")));
        }
        let s = Self { space, payload: Payload::Density(rho) };
        let min = s.min_eigenvalue();
        if min < -DENSITY_TOL {
            return Err(Error::InvalidState(format!("smallest eigenvalue {min:e}")));
        }
        Ok(s)
    }

    /// Skips validation; callers in the solvers monitor the invariants themselves.
    pub(crate) fn density_unchecked(space: SpaceDescriptor, rho: DMatrix<C64>) -> Self {
        debug_assert_eq!(rho.nrows(), space.dim());
        Self { space, payload: Payload::Density(rho) }
    }

    /// Basis state `|qubit⟩|n⟩` (`qubit` ignored on oscillator-only spaces).
    pub fn basis(space: SpaceDescriptor, qubit: usize, n: usize) -> Result<Self> {
        let q = if space.has_qubit() { qubit } else { 0 };
        if q >= space.qubit_levels() || n >= space.fock_levels() {
            return Err(Error::invalid(format!("basis state |{qubit},{n}⟩ outside {space}")));
        }
        let mut psi = DVector::zeros(space.dim());
        psi[space.index(q, n)] = C64::new(1.0, 0.0);
        Ok(Self { space, payload: Payload::Pure(psi) })
    }

    /// `|g⟩|0⟩` (or `|0⟩` without a qubit).
    pub fn ground(space: SpaceDescriptor) -> Self {
        Self::basis(space, 0, 0).expect("ground state always exists")
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn kind(&self) -> StateKind {
        match self.payload {
            Payload::Pure(_) => StateKind::Pure,
            Payload::Density(_) => StateKind::Density,
        }
    }

    pub fn as_pure(&self) -> Option<&DVector<C64>> {
        match &self.payload {
            Payload::Pure(v) => Some(v),
            Payload::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&DMatrix<C64>> {
        match &self.payload {
            Payload::Density(m) => Some(m),
            Payload::Pure(_) => None,
        }
    }

    pub fn to_density_matrix(&self) -> DMatrix<C64> {
        match &self.payload {
            Payload::Density(m) => m.clone(),
            Payload::Pure(v) => v * v.adjoint(),
        }
    }

    pub fn into_density(self) -> Self {
        match self.payload {
            Payload::Density(_) => self,
            Payload::Pure(v) => Self { space: self.space, payload: Payload::Density(&v * v.adjoint()) },
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.payload {
            Payload::Pure(v) => v.norm_squared(),
            Payload::Density(m) => m.trace().re,
        }
    }

    /// `Tr(ρ op)`, or `⟨ψ|op|ψ⟩`.
    pub fn expectation(&self, op: &Operator) -> C64 {
        assert_eq!(self.space, op.space(), "state and operator spaces differ");
        match &self.payload {
            Payload::Pure(v) => v.dotc(&(op.matrix() * v)),
            Payload::Density(m) => (m * op.matrix()).trace(),
        }
    }

    pub fn purity(&self) -> f64 {
        match &self.payload {
            Payload::Pure(v) => v.norm_squared().powi(2),
            Payload::Density(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Eigenvalues of the density matrix (Hermitian part), ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match &self.payload {
            Payload::Pure(v) => {
                let mut e = vec![0.0; v.len()];
                *e.last_mut().unwrap() = v.norm_squared();
                e
            }
            Payload::Density(m) => hermitian_eigenvalues(m),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `−Tr ρ ln ρ`, with eigenvalues below 1e-15 dropped.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues().into_iter().filter(|&p| p > 1e-15).map(|p| -p * p.ln()).sum()
    }

    /// Reduced oscillator state (partial trace over the qubit).
    pub fn fock_marginal(&self) -> Result<QuantumState> {
        let fock = self.space.fock_factor().ok_or_else(|| Error::invalid("state has no oscillator factor"))?;
        if !self.space.has_qubit() {
            return Ok(self.clone().into_density());
        }
        let f = self.space.fock_levels();
        let rho = self.to_density_matrix();
        let mu = DMatrix::from_fn(f, f, |i, j| rho[(i, j)] + rho[(f + i, f + j)]);
        Ok(Self::density_unchecked(fock, mu))
    }

    /// `μ ⊗ |q⟩⟨q|` for an oscillator-only state `μ`, laid out qubit ⊗ oscillator.
    pub fn with_qubit_level(&self, qubit: usize) -> Result<QuantumState> {
        if self.space.has_qubit() || qubit > 1 {
            return Err(Error::invalid("with_qubit_level expects an oscillator-only state and a qubit level 0 or 1"));
        }
        let space = SpaceDescriptor::qubit_fock(self.space.fock_cutoff())?;
        let f = space.fock_levels();
        let mu = self.to_density_matrix();
        let mut rho = DMatrix::zeros(space.dim(), space.dim());
        rho.view_mut((qubit * f, qubit * f), (f, f)).copy_from(&mu);
        Ok(Self::density_unchecked(space, rho))
    }

    /// Restrict to Fock levels `0..=fock_cutoff` and renormalize. Returns the
    /// state together with the discarded probability.
    pub fn truncated(&self, fock_cutoff: usize) -> Result<(QuantumState, f64)> {
        let target = self.space.with_fock_cutoff(fock_cutoff)?;
        if fock_cutoff > self.space.fock_cutoff() {
            return Err(Error::invalid("truncated() cannot enlarge the Fock space"));
        }
        let keep: Vec<usize> = (0..target.dim())
            .map(|i| {
                let (q, n) = target.decompose(i);
                self.space.index(q, n)
            })
            .collect();
        let total = self.trace();
        match &self.payload {
            Payload::Pure(v) => {
                let w = DVector::from_iterator(keep.len(), keep.iter().map(|&i| v[i]));
                let kept = w.norm_squared();
                Ok((Self::pure_normalized(target, w)?, total - kept))
            }
            Payload::Density(m) => {
                let w = DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);
                let kept = w.trace().re;
                if kept <= 0.0 {
                    return Err(Error::InvalidState("no weight left after truncation".into()));
                }
                Ok((Self::density_unchecked(target, w / C64::new(kept, 0.0)), total - kept))
            }
        }
    }

    /// `max(‖ρ − ρ†‖_max)`; zero for pure states.
    pub fn hermiticity_error(&self) -> f64 {
        match &self.payload {
            Payload::Pure(_) => 0.0,
            Payload::Density(m) => (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    /// Random full-rank density matrix whose oscillator support is limited to
    /// levels `0..=fock_support` (keeps test states away from the truncation edge).
    pub fn random_density<R: rand::Rng + ?Sized>(space: SpaceDescriptor, fock_support: usize, rng: &mut R) -> Self {
        let d = space.dim();
        let g = DMatrix::from_fn(d, d, |i, _| {
            let (_, n) = space.decompose(i);
            if n <= fock_support || !space.has_fock() {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let m = &g * g.adjoint();
        let tr = m.trace();
        Self::density_unchecked(space, m / tr)
    }

    /// Multiply a pure state by a global phase (used in invariance tests).
    pub fn with_global_phase(&self, phase: f64) -> Self {
        match &self.payload {
            Payload::Pure(v) => Self { space: self.space, payload: Payload::Pure(v * C64::from_polar(1.0, phase)) },
            Payload::Density(_) => self.clone(),
        }
    }
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub(crate) fn hermitian_min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    // Entries near 1e-150 square to the edge of the f64 range inside the
    // Householder reduction and come back as 0/0. Relative to the largest
    // entry they move no eigenvalue by more than d·1e-100.
    let floor = 1e-100 * h.iter().map(|z| z.norm()).fold(0.0, f64::max);
    h.iter_mut().filter(|z| z.norm() < floor).for_each(|z| *z = C64::new(0.0, 0.0));
    let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Weight a thermal distribution with mean `n_th` places above level `fock_cutoff`.
pub fn thermal_tail_weight(n_th: f64, fock_cutoff: usize) -> f64 {
    if n_th <= 0.0 {
        return 0.0;
    }
    let x = n_th / (n_th + 1.0);
    x.powi(fock_cutoff as i32 + 1)
}

/// Thermal oscillator state with mean occupation `n_th` (renormalized after
/// truncation), times `|g⟩⟨g|` when `space` carries a qubit.
pub fn thermal_state(n_th: f64, space: SpaceDescriptor) -> Result<QuantumState> {
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::invalid(format!("thermal occupation must be ≥ 0, got {n_th}")));
    }
    if !space.has_fock() {
        return Err(Error::invalid("thermal_state needs an oscillator factor"));
    }
    let tail = thermal_tail_weight(n_th, space.fock_cutoff());
    if tail > 1e-4 {
        log::warn!("thermal_state: n_th = {n_th} loses tail weight {tail:.2e} at N_max = {}", space.fock_cutoff());
    }
    let f = space.fock_levels();
    let x = if n_th > 0.0 { n_th / (n_th + 1.0) } else { 0.0 };
    let mut p: Vec<f64> = (0..f).map(|n| x.powi(n as i32)).collect();
    p[0] = 1.0;
    let z: f64 = p.iter().sum();
    let mut rho = DMatrix::zeros(space.dim(), space.dim());
    for (n, pn) in p.iter().enumerate() {
        let i = space.index(0, n);
        rho[(i, i)] = C64::new(pn / z, 0.0);
    }
    Ok(QuantumState::density_unchecked(space, rho))
}
