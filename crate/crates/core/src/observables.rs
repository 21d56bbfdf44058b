//! Quantities reported from states: n̄, qubit excitation, quadrature variance
//! and overlap with the squeezed-vacuum target.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::quantum::sparse::Csr;
use crate::quantum::{
    number_operator, quadrature_x, qubit_operator, squeeze_operator, QuantumState, QubitOp, SpaceDescriptor, C64,
};

pub fn mean_phonon(rho: &QuantumState) -> f64 {
    rho.expectation(&number_operator(rho.space())).re
}

/// Tr(ρ |e⟩⟨e| ⊗ I). NaN on an oscillator-only space, where the qubit has
/// been eliminated and its population is not tracked.
pub fn excited_population(rho: &QuantumState) -> f64 {
    match qubit_operator(QubitOp::ExcitedProjector, rho.space()) {
        Ok(p) => rho.expectation(&p).re,
        Err(_) => f64::NAN,
    }
}

/// `⟨X²⟩ − ⟨X⟩²` with `X = b + b†`; 1 for the vacuum.
pub fn coherent_variance(rho: &QuantumState) -> f64 {
    let x = quadrature_x(rho.space());
    let mean = rho.expectation(&x).re;
    rho.expectation(&(&x * &x)).re - mean * mean
}

/// The target `S(ζ)|0⟩|g⟩` (or `S(ζ)|0⟩` without a qubit).
pub fn squeezed_vacuum(space: SpaceDescriptor, zeta: f64) -> QuantumState {
    let s = squeeze_operator(zeta, space);
    let psi = s.matrix().column(space.index(0, 0)).into_owned();
    QuantumState::pure_normalized(space, psi).expect("squeezed vacuum has unit norm up to truncation")
}

/// `⟨Ψ_s|ρ|Ψ_s⟩` for `Ψ_s = S(ζ)|0⟩|g⟩`.
pub fn squeezed_vacuum_fidelity(rho: &QuantumState, zeta: f64) -> f64 {
    let target = squeezed_vacuum(rho.space(), zeta);
    let psi = target.as_pure().expect("target is pure");
    let value = match rho.as_pure() {
        Some(phi) => psi.dotc(phi).norm_sqr(),
        None => psi.dotc(&(rho.as_density().expect("density") * psi)).re,
    };
    value.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableSet {
    pub mean_phonon: f64,
    pub excited_pop: f64,
    pub variance_v: f64,
    pub fidelity: Option<f64>,
}

impl ObservableSet {
    pub fn of(rho: &QuantumState, zeta: Option<f64>) -> Self {
        Self {
            mean_phonon: mean_phonon(rho),
            excited_pop: excited_population(rho),
            variance_v: coherent_variance(rho),
            fidelity: zeta.map(|z| squeezed_vacuum_fidelity(rho, z)),
        }
    }
}

/// Raw moments needed for n̄, P and V, as evaluated on one state.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Moments {
    pub n: f64,
    pub p: f64,
    pub x: f64,
    pub x2: f64,
}

impl Moments {
    pub fn variance(&self) -> f64 {
        self.x2 - self.x * self.x
    }
}

/// Sparse copies of the observables for the solvers' sampling loops.
pub(crate) struct Probe {
    n: Csr,
    pe: Option<Csr>,
    x: Csr,
    x2: Csr,
}

impl Probe {
    pub fn new(space: SpaceDescriptor) -> Self {
        let x = quadrature_x(space);
        Self {
            n: Csr::from_dense(number_operator(space).matrix()),
            pe: qubit_operator(QubitOp::ExcitedProjector, space).ok().map(|p| Csr::from_dense(p.matrix())),
            x2: Csr::from_dense((&x * &x).matrix()),
            x: Csr::from_dense(x.matrix()),
        }
    }

    pub fn density(&self, rho: &DMatrix<C64>) -> Moments {
        Moments {
            n: self.n.trace_product(rho).re,
            p: self.pe.as_ref().map_or(f64::NAN, |p| p.trace_product(rho).re),
            x: self.x.trace_product(rho).re,
            x2: self.x2.trace_product(rho).re,
        }
    }

    /// Moments of the normalised direction of `psi`.
    pub fn pure(&self, psi: &DVector<C64>) -> Moments {
        let norm_sq = psi.norm_squared();
        Moments {
            n: self.n.expectation_pure(psi).re / norm_sq,
            p: self.pe.as_ref().map_or(f64::NAN, |p| p.expectation_pure(psi).re / norm_sq),
            x: self.x.expectation_pure(psi).re / norm_sq,
            x2: self.x2.expectation_pure(psi).re / norm_sq,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::thermal_state;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn qf(n: usize) -> SpaceDescriptor {
        SpaceDescriptor::qubit_fock(n).unwrap()
    }

    #[test]
    fn vacuum_values() {
        let v = QuantumState::ground(qf(10));
        assert_eq!(mean_phonon(&v), 0.0);
        assert_eq!(excited_population(&v), 0.0);
        assert_relative_eq!(coherent_variance(&v), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn thermal_values() {
        let rho = thermal_state(41.0, SpaceDescriptor::fock(400).unwrap()).unwrap();
        assert!((mean_phonon(&rho) - 41.0).abs() < 0.1);
        let rho = thermal_state(2.0, qf(120)).unwrap();
        assert!((coherent_variance(&rho) - 5.0).abs() < 1e-6);
        assert_eq!(excited_population(&rho), 0.0);
    }

    #[test]
    fn squeezed_vacuum_values() {
        let zeta = 0.7f64.atanh();
        let s = squeezed_vacuum(qf(60), zeta);
        assert_relative_eq!(mean_phonon(&s), zeta.sinh().powi(2), max_relative = 1e-8);
        assert_relative_eq!(coherent_variance(&s), 0.3 / 1.7, max_relative = 1e-8);
        assert!((coherent_variance(&s) - 0.17647).abs() < 1e-5);
        assert_relative_eq!(squeezed_vacuum_fidelity(&s, zeta), 1.0, max_relative = 1e-12);
        let overlap = squeezed_vacuum_fidelity(&QuantumState::ground(qf(60)), zeta);
        assert_relative_eq!(overlap, 1.0 / zeta.cosh(), max_relative = 1e-10);
        assert!((overlap - 0.714).abs() < 1e-3);
        let excited = QuantumState::basis(qf(60), 1, 0).unwrap();
        assert_eq!(squeezed_vacuum_fidelity(&excited, zeta), 0.0);
    }

    #[test]
    fn maximally_mixed_qubit() {
        let s = qf(3);
        let mut rho = DMatrix::<C64>::zeros(8, 8);
        rho[(s.index(0, 0), s.index(0, 0))] = C64::new(0.5, 0.0);
        rho[(s.index(1, 0), s.index(1, 0))] = C64::new(0.5, 0.0);
        let rho = QuantumState::density(s, rho).unwrap();
        assert_relative_eq!(excited_population(&rho), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn global_phase_invariance_and_probe_agreement() {
        let s = qf(6);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let psi = DVector::from_fn(s.dim(), |_, _| {
            use rand::Rng;
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let a = QuantumState::pure_normalized(s, psi).unwrap();
        let b = a.with_global_phase(1.234);
        let (oa, ob) = (ObservableSet::of(&a, Some(0.3)), ObservableSet::of(&b, Some(0.3)));
        assert!((oa.mean_phonon - ob.mean_phonon).abs() < 1e-14);
        assert!((oa.variance_v - ob.variance_v).abs() < 1e-14);
        assert!((oa.fidelity.unwrap() - ob.fidelity.unwrap()).abs() < 1e-14);
        let probe = Probe::new(s);
        let m = probe.pure(a.as_pure().unwrap());
        let d = probe.density(&a.to_density_matrix());
        assert!((m.n - oa.mean_phonon).abs() < 1e-12 && (d.n - oa.mean_phonon).abs() < 1e-12);
        assert!((m.variance() - oa.variance_v).abs() < 1e-12);
        assert!((d.p - oa.excited_pop).abs() < 1e-12);
    }
}
