use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Qubit basis label of the ground state `|g⟩`.
pub const GROUND: usize = 0;
/// Qubit basis label of the excited state `|e⟩`.
pub const EXCITED: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factors {
    /// The bare two-level system.
    Qubit,
    /// The truncated oscillator alone (used by the adiabatically reduced models).
    Fock,
    /// qubit ⊗ oscillator.
    QubitFock,
}

/// Shape of a truncated Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    factors: Factors,
    fock_cutoff: usize,
}

impl SpaceDescriptor {
    /// qubit ⊗ Fock states `0..=fock_cutoff`.
    pub fn qubit_fock(fock_cutoff: usize) -> Result<Self> {
        Self::check_cutoff(fock_cutoff)?;
        Ok(Self { factors: Factors::QubitFock, fock_cutoff })
    }

    /// Oscillator-only space with Fock states `0..=fock_cutoff`.
    pub fn fock(fock_cutoff: usize) -> Result<Self> {
        Self::check_cutoff(fock_cutoff)?;
        Ok(Self { factors: Factors::Fock, fock_cutoff })
    }

    pub fn qubit() -> Self {
        Self { factors: Factors::Qubit, fock_cutoff: 0 }
    }

    fn check_cutoff(n: usize) -> Result<()> {
        if n < 1 {
            return Err(Error::invalid("Fock cutoff must be at least 1"));
        }
        Ok(())
    }

    pub fn factors(&self) -> Factors {
        self.factors
    }

    pub fn has_qubit(&self) -> bool {
        matches!(self.factors, Factors::Qubit | Factors::QubitFock)
    }

    pub fn has_fock(&self) -> bool {
        matches!(self.factors, Factors::Fock | Factors::QubitFock)
    }

    /// `N_max`; zero for a bare qubit space.
    pub fn fock_cutoff(&self) -> usize {
        self.fock_cutoff
    }

    pub fn qubit_levels(&self) -> usize {
        if self.has_qubit() {
            2
        } else {
            1
        }
    }

    pub fn fock_levels(&self) -> usize {
        if self.has_fock() {
            self.fock_cutoff + 1
        } else {
            1
        }
    }

    pub fn dim(&self) -> usize {
        self.qubit_levels() * self.fock_levels()
    }

    /// Basis index of `|qubit⟩|n⟩`.
    pub fn index(&self, qubit: usize, n: usize) -> usize {
        debug_assert!(qubit < self.qubit_levels() && n < self.fock_levels());
        qubit * self.fock_levels() + n
    }

    /// Inverse of [`index`](Self::index): `(qubit level, phonon number)`.
    pub fn decompose(&self, index: usize) -> (usize, usize) {
        let f = self.fock_levels();
        (index / f, index % f)
    }

    /// The same factor layout with a different Fock cutoff.
    pub fn with_fock_cutoff(&self, fock_cutoff: usize) -> Result<Self> {
        match self.factors {
            Factors::Qubit => Err(Error::invalid("a bare qubit space has no Fock factor")),
            Factors::Fock => Self::fock(fock_cutoff),
            Factors::QubitFock => Self::qubit_fock(fock_cutoff),
        }
    }

    /// Oscillator factor of this space, if any.
    pub fn fock_factor(&self) -> Option<Self> {
        self.has_fock().then(|| Self { factors: Factors::Fock, fock_cutoff: self.fock_cutoff })
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::DimensionMismatch(format!("{self} vs {other}")));
        }
        Ok(())
    }
}

impl std::fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.factors {
            Factors::Qubit => write!(f, "qubit"),
            Factors::Fock => write!(f, "fock(N_max={})", self.fock_cutoff),
            Factors::QubitFock => write!(f, "qubit⊗fock(N_max={})", self.fock_cutoff),
        }
    }
}
