//! Sparse form of a model's generator, compiled once per run.

use nalgebra::{DMatrix, DVector};

use crate::model::{Dissipator, LindbladModel};
use crate::quantum::sparse::Csr;
use crate::quantum::C64;

const I: C64 = C64::new(0.0, 1.0);

struct SparseDrive {
    op: Csr,
    op_adj: Csr,
    amplitude: C64,
    frequency: f64,
}

/// `AρB†` sandwich with a complex weight.
struct Sandwich {
    a: Csr,
    b: Csr,
    weight: C64,
}

pub(crate) struct Generator {
    dim: usize,
    /// `H − (i/2)K`, `K` collecting every anticommutator piece.
    h_eff: Csr,
    sandwiches: Vec<Sandwich>,
    drives: Vec<SparseDrive>,
    /// Collapse channels for trajectories, `√rate·A`.
    pub jumps: Vec<Csr>,
    scratch_needed: bool,
}

impl Generator {
    pub fn new(model: &LindbladModel) -> Self {
        let dim = model.space.dim();
        let mut k = DMatrix::<C64>::zeros(dim, dim);
        let mut sandwiches = Vec::new();
        let mut jumps = Vec::new();
        for d in &model.dissipators {
            match d {
                Dissipator::Collapse { op, rate } => {
                    let a = op.matrix();
                    k += a.adjoint() * a * C64::new(*rate, 0.0);
                    let c = Csr::from_dense(a);
                    sandwiches.push(Sandwich { a: c.clone(), b: c, weight: C64::new(*rate, 0.0) });
                    let scaled = Csr::from_dense(&(a * C64::new(rate.sqrt(), 0.0)));
                    jumps.push(scaled);
                }
                Dissipator::Cross { a, b, weight } => {
                    let (am, bm) = (a.matrix(), b.matrix());
                    k += bm.adjoint() * am * *weight + am.adjoint() * bm * weight.conj();
                    let (ca, cb) = (Csr::from_dense(am), Csr::from_dense(bm));
                    sandwiches.push(Sandwich { a: ca.clone(), b: cb.clone(), weight: *weight });
                    sandwiches.push(Sandwich { a: cb, b: ca, weight: weight.conj() });
                }
            }
        }
        let h_eff = model.hamiltonian.matrix() - k * C64::new(0.0, 0.5);
        let drives = model
            .drives
            .iter()
            .map(|d| {
                let op = Csr::from_dense(d.op.matrix());
                SparseDrive { op_adj: op.adjoint(), op, amplitude: d.amplitude, frequency: d.frequency }
            })
            .collect();
        Self { dim, h_eff: Csr::from_dense(&h_eff), scratch_needed: !sandwiches.is_empty(), sandwiches, drives, jumps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Fastest rate the explicit integrators have to resolve, rad/s.
    pub fn stiffness(&self) -> f64 {
        let mut s = self.h_eff.norm_inf();
        for d in &self.drives {
            s = s.max(d.frequency.abs()).max(2.0 * d.amplitude.norm() * d.op.norm_inf());
        }
        for w in &self.sandwiches {
            s = s.max(w.weight.norm() * w.a.norm_inf() * w.b.norm_inf());
        }
        s
    }

    pub fn default_dt(&self) -> f64 {
        let s = self.stiffness();
        if s > 0.0 {
            1.0 / (20.0 * s)
        } else {
            f64::INFINITY
        }
    }

    /// `out = L_t(ρ)`; `scratch` is a dim×dim work buffer.
    pub fn apply(&self, t: f64, rho: &DMatrix<C64>, out: &mut DMatrix<C64>, scratch: &mut DMatrix<C64>) {
        out.fill(C64::new(0.0, 0.0));
        self.h_eff.mul_dense_acc(rho, -I, out);
        self.h_eff.dense_mul_adjoint_acc(rho, I, out);
        for d in &self.drives {
            let c = d.amplitude * C64::from_polar(1.0, d.frequency * t);
            // −i[cA + c*A†, ρ]
            d.op.mul_dense_acc(rho, -I * c, out);
            d.op_adj.mul_dense_acc(rho, -I * c.conj(), out);
            d.op_adj.dense_mul_adjoint_acc(rho, I * c, out);
            d.op.dense_mul_adjoint_acc(rho, I * c.conj(), out);
        }
        if self.scratch_needed {
            for w in &self.sandwiches {
                scratch.fill(C64::new(0.0, 0.0));
                w.a.mul_dense_acc(rho, C64::new(1.0, 0.0), scratch);
                w.b.dense_mul_adjoint_acc(scratch, w.weight, out);
            }
        }
    }

    /// `out = −i H_eff(t) ψ` for the no-jump trajectory drift.
    pub fn apply_nonhermitian(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) {
        out.fill(C64::new(0.0, 0.0));
        self.h_eff.matvec_acc(psi, -I, out);
        for d in &self.drives {
            let c = d.amplitude * C64::from_polar(1.0, d.frequency * t);
            d.op.matvec_acc(psi, -I * c, out);
            d.op_adj.matvec_acc(psi, -I * c.conj(), out);
        }
    }

    /// Sparse `H_eff` (time-independent part), for steady-state assembly.
    pub fn h_eff(&self) -> &Csr {
        &self.h_eff
    }

    /// Sandwich terms as `(A, B, w)` for steady-state assembly.
    pub fn sandwiches(&self) -> impl Iterator<Item = (&Csr, &Csr, C64)> {
        self.sandwiches.iter().map(|s| (&s.a, &s.b, s.weight))
    }
}
