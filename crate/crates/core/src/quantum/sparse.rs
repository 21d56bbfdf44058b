//! Compressed-row operators for the inner loops of the solvers.
//!
//! The model operators are dense [`Operator`](super::Operator)s, but the ladder
//! and Pauli structure leaves only O(dim) non-zeros, so the propagators work
//! with these instead.

use nalgebra::{DMatrix, DVector};

use super::C64;

#[derive(Clone, Debug)]
pub struct Csr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    /// Drops exact zeros.
    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..dim {
            for j in 0..dim {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self { dim, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Entries `(col, value)` of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// All entries `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn transpose(&self) -> Self {
        self.map_transpose(|v| v)
    }

    pub fn adjoint(&self) -> Self {
        self.map_transpose(|v| v.conj())
    }

    fn map_transpose(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut counts = vec![0usize; self.dim + 1];
        for &c in &self.cols {
            counts[c + 1] += 1;
        }
        for i in 0..self.dim {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut cols = vec![0; self.nnz()];
        let mut vals = vec![C64::new(0.0, 0.0); self.nnz()];
        for (i, j, v) in self.entries() {
            let k = next[j];
            cols[k] = i;
            vals[k] = f(v);
            next[j] += 1;
        }
        Self { dim: self.dim, row_ptr, cols, vals }
    }

    /// Largest absolute row sum (the induced ∞-norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim).map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `out += alpha · A · x` for column-major dense `x`.
    pub fn mul_dense_acc(&self, x: &DMatrix<C64>, alpha: C64, out: &mut DMatrix<C64>) {
        let d = self.dim;
        debug_assert_eq!(x.nrows(), d);
        let ncols = x.ncols();
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for j in 0..ncols {
            let xc = &xs[j * d..(j + 1) * d];
            let oc = &mut os[j * d..(j + 1) * d];
            for i in 0..d {
                let r = self.row_ptr[i]..self.row_ptr[i + 1];
                if r.is_empty() {
                    continue;
                }
                let mut s = C64::new(0.0, 0.0);
                for k in r {
                    s += self.vals[k] * xc[self.cols[k]];
                }
                oc[i] += alpha * s;
            }
        }
    }

    /// `out += alpha · x · A†` for column-major dense `x`.
    pub fn dense_mul_adjoint_acc(&self, x: &DMatrix<C64>, alpha: C64, out: &mut DMatrix<C64>) {
        let d = self.dim;
        let nrows = x.nrows();
        debug_assert_eq!(x.ncols(), d);
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        // Column j of x·A† is Σ_k conj(A[j,k]) · x[:, k].
        for j in 0..d {
            for (k, a) in self.row(j) {
                let c = alpha * a.conj();
                let xc = &xs[k * nrows..(k + 1) * nrows];
                let oc = &mut os[j * nrows..(j + 1) * nrows];
                for (o, &xv) in oc.iter_mut().zip(xc) {
                    *o += c * xv;
                }
            }
        }
    }

    /// `out += alpha · A · v`.
    pub fn matvec_acc(&self, v: &DVector<C64>, alpha: C64, out: &mut DVector<C64>) {
        for i in 0..self.dim {
            let mut s = C64::new(0.0, 0.0);
            for (j, a) in self.row(i) {
                s += a * v[j];
            }
            out[i] += alpha * s;
        }
    }

    /// `Tr(ρ A) = Σ_ij A_ij ρ_ji`.
    pub fn trace_product(&self, rho: &DMatrix<C64>) -> C64 {
        self.entries().map(|(i, j, a)| a * rho[(j, i)]).sum()
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation_pure(&self, psi: &DVector<C64>) -> C64 {
        self.entries().map(|(i, j, a)| psi[i].conj() * a * psi[j]).sum()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }
}
