use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use super::space::{SpaceDescriptor, EXCITED, GROUND};
use super::C64;
use crate::error::{Error, Result};

/// Dense operator on a truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: SpaceDescriptor,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(space: SpaceDescriptor, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on {space} (dim {d})",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zeros(space: SpaceDescriptor) -> Self {
        let d = space.dim();
        Self { space, matrix: DMatrix::zeros(d, d) }
    }

    pub fn identity(space: SpaceDescriptor) -> Self {
        let d = space.dim();
        Self { space, matrix: DMatrix::identity(d, d) }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { space: self.space, matrix: self.matrix.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { space: self.space, matrix: &self.matrix * c }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `‖A − A†‖_max`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                let e = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(e);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }

    /// `‖A†A − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.matrix.nrows();
        let p = self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(d, d);
        p.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() < tol
    }

    /// `‖A − B‖_max`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.space, other.space, "operator spaces differ");
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    /// Matrix product with a dimension check instead of a panic.
    pub fn checked_mul(&self, other: &Operator) -> Result<Operator> {
        self.space.ensure_same(&other.space)?;
        Ok(self * other)
    }

    /// `exp(self)` by scaling and squaring with a Padé approximant.
    pub fn exp(&self) -> Operator {
        Operator { space: self.space, matrix: self.matrix.exp() }
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&Operator> for &Operator {
            type Output = Operator;
            /// Panics when the operands live on different spaces.
            fn $f(self, rhs: &Operator) -> Operator {
                assert_eq!(self.space, rhs.space, "operator spaces differ");
                Operator { space: self.space, matrix: &self.matrix $op &rhs.matrix }
            }
        }
        impl $tr<Operator> for Operator {
            type Output = Operator;
            fn $f(self, rhs: Operator) -> Operator {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { space: self.space, matrix: -&self.matrix }
    }
}

/// Kronecker product `a ⊗ b` of raw matrices.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// `a ⊗ b` for a qubit operator `a` and an oscillator operator `b`.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    use super::space::Factors;
    if a.space.factors() != Factors::Qubit || b.space.factors() != Factors::Fock {
        return Err(Error::DimensionMismatch(format!(
            "tensor expects qubit ⊗ fock factors, got {} ⊗ {}",
            a.space, b.space
        )));
    }
    let space = SpaceDescriptor::qubit_fock(b.space.fock_cutoff())?;
    Operator::from_matrix(space, kron(&a.matrix, &b.matrix))
}

/// Embed an oscillator-factor matrix into `space` (identity on the qubit).
fn embed_fock(space: SpaceDescriptor, fock: DMatrix<C64>) -> Operator {
    let matrix = if space.has_qubit() {
        kron(&DMatrix::identity(2, 2), &fock)
    } else {
        fock
    };
    Operator { space, matrix }
}

fn fock_ladder(levels: usize) -> DMatrix<C64> {
    let mut b = DMatrix::zeros(levels, levels);
    for n in 1..levels {
        b[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    b
}

/// Oscillator annihilation operator `b`, truncated at `N_max`.
///
/// # Panics
/// If `space` has no oscillator factor.
pub fn fock_annihilation(space: SpaceDescriptor) -> Operator {
    assert!(space.has_fock(), "{space} has no oscillator factor");
    embed_fock(space, fock_ladder(space.fock_levels()))
}

/// Oscillator creation operator `b†`.
pub fn fock_creation(space: SpaceDescriptor) -> Operator {
    fock_annihilation(space).adjoint()
}

/// `b†b`.
pub fn number_operator(space: SpaceDescriptor) -> Operator {
    let f = space.fock_levels();
    let diag = DMatrix::from_fn(f, f, |i, j| if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) });
    embed_fock(space, diag)
}

/// Position quadrature `X = b + b†`.
pub fn quadrature_x(space: SpaceDescriptor) -> Operator {
    let b = fock_annihilation(space);
    &b + &b.adjoint()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitOp {
    /// `σ₊ = |e⟩⟨g|`
    Raise,
    /// `σ₋ = |g⟩⟨e|`
    Lower,
    /// `σ_z = |e⟩⟨e| − |g⟩⟨g|`
    Z,
    /// `|e⟩⟨e|`
    ExcitedProjector,
}

/// Qubit operator embedded as `σ ⊗ I_fock`.
pub fn qubit_operator(which: QubitOp, space: SpaceDescriptor) -> Result<Operator> {
    if !space.has_qubit() {
        return Err(Error::DimensionMismatch(format!("{space} has no qubit factor")));
    }
    let one = C64::new(1.0, 0.0);
    let mut q = DMatrix::zeros(2, 2);
    match which {
        QubitOp::Raise => q[(EXCITED, GROUND)] = one,
        QubitOp::Lower => q[(GROUND, EXCITED)] = one,
        QubitOp::Z => {
            q[(EXCITED, EXCITED)] = one;
            q[(GROUND, GROUND)] = -one;
        }
        QubitOp::ExcitedProjector => q[(EXCITED, EXCITED)] = one,
    }
    let matrix = if space.has_fock() {
        kron(&q, &DMatrix::identity(space.fock_levels(), space.fock_levels()))
    } else {
        q
    };
    Ok(Operator { space, matrix })
}

fn fock_squeeze(zeta: f64, levels: usize) -> DMatrix<C64> {
    let b = fock_ladder(levels);
    let b2 = &b * &b;
    let generator = (&b2 - b2.adjoint()) * C64::new(0.5 * zeta, 0.0);
    generator.exp()
}

/// Largest amplitude `S(ζ)|0⟩` leaves on the top two Fock levels of a cutoff-`N_max`
/// space (odd levels are never populated, so both are inspected).
pub fn squeeze_edge_amplitude(zeta: f64, fock_cutoff: usize) -> f64 {
    let s = fock_squeeze(zeta, fock_cutoff + 1);
    edge_amplitude(&s)
}

fn edge_amplitude(s: &DMatrix<C64>) -> f64 {
    let top = s.nrows() - 1;
    s[(top, 0)].norm().max(s[(top - 1, 0)].norm())
}

/// Single-mode squeeze operator `S(ζ) = exp(½ζ b² − ½ζ b†²)`.
///
/// Logs a warning when `S(ζ)|0⟩` still has amplitude above 1e-6 on the top
/// Fock levels, i.e. when the truncation visibly distorts the squeezed vacuum.
pub fn squeeze_operator(zeta: f64, space: SpaceDescriptor) -> Operator {
    assert!(space.has_fock(), "{space} has no oscillator factor");
    let s = fock_squeeze(zeta, space.fock_levels());
    let edge = edge_amplitude(&s);
    if edge > 1e-6 {
        log::warn!(
            "squeeze_operator: ⟨N_max|S({zeta})|0⟩ amplitude {edge:.2e} exceeds 1e-6 at N_max = {}",
            space.fock_cutoff()
        );
    }
    embed_fock(space, s)
}
