use nalgebra::DMatrix;

use super::operator::Operator;
use super::state::QuantumState;
use super::C64;

/// `D[A, Ω]ρ = (Ω/2)(AρA† − A†Aρ) + H.c.`
pub fn apply_dissipator(a: &Operator, rate: f64, rho: &QuantumState) -> DMatrix<C64> {
    assert_eq!(a.space(), rho.space(), "operator and state spaces differ");
    let d = rho.space().dim();
    if rate == 0.0 {
        return DMatrix::zeros(d, d);
    }
    dissipator_matrix(a.matrix(), rate, &rho.to_density_matrix())
}

/// Matrix form of [`apply_dissipator`].
pub fn dissipator_matrix(a: &DMatrix<C64>, rate: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let half = C64::new(0.5 * rate, 0.0);
    let term = (a * rho * a.adjoint() - a.adjoint() * a * rho) * half;
    &term + term.adjoint()
}

/// Off-diagonal Lindblad block between channels `A` and `B`:
/// `w(AρB† − ½{B†A, ρ}) + w*(BρA† − ½{A†B, ρ})`.
///
/// Together with diagonal channels this covers any Kossakowski matrix, e.g.
/// the two-photon term `(2b†ρb† − {b†b†, ρ}) + (2bρb − {bb, ρ})` is
/// `A = b†`, `B = b`, `w = 2`.
pub fn cross_dissipator_matrix(a: &DMatrix<C64>, b: &DMatrix<C64>, weight: C64, rho: &DMatrix<C64>) -> DMatrix<C64> {
    let half = C64::new(0.5, 0.0);
    let bda = b.adjoint() * a;
    let term = (a * rho * b.adjoint() - (&bda * rho + rho * &bda) * half) * weight;
    &term + term.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{fock_annihilation, number_operator, qubit_operator, QubitOp, SpaceDescriptor};
    use crate::quantum::state::thermal_state;
    use nalgebra::DVector;
    use rand::SeedableRng;

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }


    #[test]
    fn cross_term_reproduces_two_photon_bracket() {
        let s = SpaceDescriptor::fock(8).unwrap();
        let rho = QuantumState::random_density(s, 5, &mut rng(3)).to_density_matrix();
        let b = fock_annihilation(s).into_matrix();
        let bd = b.adjoint();
        let half = C64::new(0.5, 0.0);
        let direct = (&bd * &rho * &bd * C64::new(2.0, 0.0) - &bd * &bd * &rho - &rho * &bd * &bd)
            + (&b * &rho * &b * C64::new(2.0, 0.0) - &b * &b * &rho - &rho * &b * &b);
        let cross = cross_dissipator_matrix(&bd, &b, C64::new(2.0, 0.0), &rho);
        assert!((direct - cross).iter().all(|z| z.norm() < 1e-12));
        // A diagonal "cross" block is an ordinary channel.
        let diag = cross_dissipator_matrix(&b, &b, half, &rho);
        assert!((diag - dissipator_matrix(&b, 1.0, &rho)).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn zero_rate_gives_zero() {
        let s = SpaceDescriptor::qubit_fock(3).unwrap();
        let rho = QuantumState::random_density(s, s.fock_cutoff(), &mut rng(1));
        let out = apply_dissipator(&fock_annihilation(s), 0.0, &rho);
        assert!(out.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn trace_preserving_on_random_states() {
        let s = SpaceDescriptor::qubit_fock(4).unwrap();
        let sm = qubit_operator(QubitOp::Lower, s).unwrap();
        for seed in 0..10 {
            let rho = QuantumState::random_density(s, s.fock_cutoff(), &mut rng(seed));
            let out = apply_dissipator(&sm, 2.7, &rho);
            assert!(out.trace().norm() < 1e-12);
            assert!((&out - out.adjoint()).iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn one_phonon_decay_rate() {
        let s = SpaceDescriptor::fock(3).unwrap();
        let one = QuantumState::basis(s, 0, 1).unwrap();
        let gamma = 0.37;
        let drho = apply_dissipator(&fock_annihilation(s), gamma, &one);
        let dn = (drho * number_operator(s).matrix()).trace();
        assert!((dn.re + gamma).abs() < 1e-14);
    }

    #[test]
    fn thermal_state_is_stationary_under_balanced_bath() {
        let s = SpaceDescriptor::fock(60).unwrap();
        let n_th = 0.8;
        let rho = thermal_state(n_th, s).unwrap();
        let b = fock_annihilation(s);
        let total = apply_dissipator(&b, n_th + 1.0, &rho) + apply_dissipator(&b.adjoint(), n_th, &rho);
        // Only the truncation edge deviates.
        let v = DVector::from_iterator(50, (0..50).map(|i| total[(i, i)]));
        assert!(v.iter().all(|z| z.norm() < 1e-12));
    }
}
