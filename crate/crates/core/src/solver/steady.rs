//! Stationary states of time-independent models.
//!
//! The Liouvillian is restricted to the block that contains the trace: the
//! models here conserve the excitation number `n + q` either exactly or
//! mod 2, so only `ρ_ij` with matching charge can be non-zero. That block is
//! reordered by RCM and factored as a band matrix with one diagonal
//! population pinned to 1 (replacing its redundant equation).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::LindbladModel;
use crate::quantum::sparse::Csr;
use crate::quantum::{QuantumState, SpaceDescriptor, C64};

use super::banded::{permute, reverse_cuthill_mckee, BandedLu, SparseRows};
use super::generator::Generator;
use super::master::evolve_master;
use super::options::{Integrator, SolverOptions};

/// Residual target `‖L(ρ)‖_max / (rate scale)`.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-10;
const PIVOT_RELATIVE_FLOOR: f64 = 1e-12;
const MAX_PIN_ATTEMPTS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// `n + q` conserved.
    Charge,
    /// `n + q` conserved mod 2.
    Parity,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteadyMethod {
    BandedLu,
    LongTimeIntegration,
}

#[derive(Clone, Debug)]
pub struct SteadyReport {
    pub state: QuantumState,
    /// `‖L(ρ)‖_max / rate scale`.
    pub residual: f64,
    pub sector: Sector,
    pub unknowns: usize,
    pub bandwidth: (usize, usize),
    pub method: SteadyMethod,
}

pub fn steady_state(model: &LindbladModel) -> Result<QuantumState> {
    steady_state_report(model).map(|r| r.state)
}

pub fn steady_state_report(model: &LindbladModel) -> Result<SteadyReport> {
    if model.is_time_dependent() {
        return Err(Error::Unsupported("steady state of a driven (time-dependent) model".into()));
    }
    let gen = Generator::new(model);
    let scale = gen.stiffness().max(f64::MIN_POSITIVE);
    let space = model.space;
    let charges: Vec<i64> = (0..space.dim())
        .map(|i| {
            let (q, n) = space.decompose(i);
            (q + n) as i64
        })
        .collect();
    let sector = [Sector::Charge, Sector::Parity, Sector::Full]
        .into_iter()
        .find(|&s| respects(&gen, &charges, s))
        .expect("the full space is always invariant");
    let block = Block::new(&charges, sector);
    let rows = assemble(&gen, &block);
    let perm = reverse_cuthill_mckee(&rows);
    let (rows_p, kl, ku) = permute(&rows, &perm);
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let matrix_scale = rows.iter().flatten().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    log::debug!("steady state: {:?} block, {} unknowns, band ({kl}, {ku})", sector, rows.len());

    let pins = pin_candidates(space, &block);
    let mut last_singular = None;
    for &pin in pins.iter().take(MAX_PIN_ATTEMPTS) {
        let p = inv[pin];
        let mut system = rows_p.clone();
        system[p] = vec![(p, C64::new(matrix_scale, 0.0))];
        let lu = match BandedLu::factor(&system, kl, ku, PIVOT_RELATIVE_FLOOR * matrix_scale) {
            Ok(lu) => lu,
            Err(s) => {
                last_singular = Some(s.column);
                continue;
            }
        };
        let mut rhs = vec![C64::new(0.0, 0.0); system.len()];
        rhs[p] = C64::new(matrix_scale, 0.0);
        let mut x = rhs.clone();
        lu.solve(&mut x);
        // Two rounds of iterative refinement against the unfactored system.
        for _ in 0..2 {
            let mut r: Vec<C64> = rhs.clone();
            for (i, row) in system.iter().enumerate() {
                for &(c, v) in row {
                    r[i] -= v * x[c];
                }
            }
            lu.solve(&mut r);
            for (xi, ri) in x.iter_mut().zip(&r) {
                *xi += ri;
            }
        }
        let rho = block.unpack(space, &x, &inv);
        let Some(rho) = normalise(rho) else { continue };
        let residual = residual(&gen, &rho) / scale;
        if residual < STEADY_RESIDUAL_TOL {
            return Ok(SteadyReport {
                state: QuantumState::density_unchecked(space, rho),
                residual,
                sector,
                unknowns: rows.len(),
                bandwidth: (kl, ku),
                method: SteadyMethod::BandedLu,
            });
        }
        log::warn!("steady state: direct solve residual {residual:.2e} above {STEADY_RESIDUAL_TOL:e}; integrating instead");
        return long_time(model, &gen, QuantumState::density_unchecked(space, rho), scale, sector, rows.len());
    }
    match last_singular {
        Some(col) => Err(Error::DegenerateSteadyState(format!(
            "pinned Liouvillian stays singular (column {col}) for every pinned population; the stationary space has dimension > 1"
        ))),
        None => long_time(model, &gen, QuantumState::ground(space), scale, sector, rows.len()),
    }
}

fn respects(gen: &Generator, charges: &[i64], sector: Sector) -> bool {
    let modulus = match sector {
        Sector::Charge => None,
        Sector::Parity => Some(2),
        Sector::Full => return true,
    };
    let reduce = |v: i64| modulus.map_or(v, |m| v.rem_euclid(m));
    let shift = |op: &Csr| -> Option<Option<i64>> {
        let mut s = None;
        for (i, j, _) in op.entries() {
            let d = reduce(charges[i] - charges[j]);
            match s {
                None => s = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        Some(s)
    };
    match shift(gen.h_eff()) {
        Some(None) | Some(Some(0)) => {}
        _ => return false,
    }
    gen.sandwiches().all(|(a, b, _)| match (shift(a), shift(b)) {
        (Some(Some(x)), Some(Some(y))) => x == y,
        (Some(None), _) | (_, Some(None)) => true,
        _ => false,
    })
}

/// The `ρ_ij` kept as unknowns.
struct Block {
    pairs: Vec<(usize, usize)>,
    lookup: Vec<usize>,
    dim: usize,
}

impl Block {
    fn new(charges: &[i64], sector: Sector) -> Self {
        let d = charges.len();
        let keep = |i: usize, j: usize| match sector {
            Sector::Charge => charges[i] == charges[j],
            Sector::Parity => (charges[i] - charges[j]).rem_euclid(2) == 0,
            Sector::Full => true,
        };
        let mut pairs = Vec::new();
        let mut lookup = vec![usize::MAX; d * d];
        for i in 0..d {
            for j in 0..d {
                if keep(i, j) {
                    lookup[i * d + j] = pairs.len();
                    pairs.push((i, j));
                }
            }
        }
        Self { pairs, lookup, dim: d }
    }

    fn id(&self, i: usize, j: usize) -> usize {
        self.lookup[i * self.dim + j]
    }

    fn unpack(&self, space: SpaceDescriptor, x: &[C64], inv: &[usize]) -> DMatrix<C64> {
        let d = space.dim();
        let mut rho = DMatrix::zeros(d, d);
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            rho[(i, j)] = x[inv[k]];
        }
        rho
    }
}

fn assemble(gen: &Generator, block: &Block) -> SparseRows {
    let h = gen.h_eff();
    let sandwiches: Vec<_> = gen.sandwiches().collect();
    let minus_i = C64::new(0.0, -1.0);
    block
        .pairs
        .iter()
        .map(|&(i, j)| {
            let mut row: Vec<(usize, C64)> = Vec::new();
            let mut push = |k: usize, l: usize, v: C64| {
                let id = block.id(k, l);
                debug_assert!(id != usize::MAX, "generator leaves the symmetry block");
                if id != usize::MAX {
                    row.push((id, v));
                }
            };
            for (k, v) in h.row(i) {
                push(k, j, minus_i * v);
            }
            for (k, v) in h.row(j) {
                push(i, k, -minus_i * v.conj());
            }
            for &(a, b, w) in &sandwiches {
                for (k, av) in a.row(i) {
                    for (l, bv) in b.row(j) {
                        push(k, l, w * av * bv.conj());
                    }
                }
            }
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, C64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| e.1 != C64::new(0.0, 0.0));
            merged
        })
        .collect()
}

/// Diagonal unknowns to pin, most likely non-zero first: the ground state,
/// then the rest in basis order.
fn pin_candidates(space: SpaceDescriptor, block: &Block) -> Vec<usize> {
    let mut out = vec![block.id(space.index(0, 0), space.index(0, 0))];
    for i in 0..space.dim() {
        let id = block.id(i, i);
        if !out.contains(&id) {
            out.push(id);
        }
    }
    out
}

fn normalise(rho: DMatrix<C64>) -> Option<DMatrix<C64>> {
    let tr = rho.trace();
    if !(tr.norm() > 0.0 && tr.re.is_finite()) {
        return None;
    }
    let rho = rho / tr;
    // The exact null vector is Hermitian; remove the round-off part.
    Some((&rho + rho.adjoint()) * C64::new(0.5, 0.0))
}

fn residual(gen: &Generator, rho: &DMatrix<C64>) -> f64 {
    let d = rho.nrows();
    let (mut out, mut scratch) = (DMatrix::zeros(d, d), DMatrix::zeros(d, d));
    gen.apply(0.0, rho, &mut out, &mut scratch);
    out.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Fallback: integrate until the residual target is met.
fn long_time(
    model: &LindbladModel,
    gen: &Generator,
    start: QuantumState,
    scale: f64,
    sector: Sector,
    unknowns: usize,
) -> Result<SteadyReport> {
    let chunk = 2000.0 * gen.default_dt();
    let mut state = start;
    let mut t = 0.0;
    for _ in 0..500 {
        let mut opts = SolverOptions::uniform_from(t, t + chunk, 0).with_integrator(Integrator::Rk45);
        opts.tolerance = 1e-12;
        let run = evolve_master(model, &state, &opts)?;
        state = run.final_state;
        t += chunk;
        let rho = state.to_density_matrix();
        let res = residual(gen, &rho) / scale;
        if res < STEADY_RESIDUAL_TOL {
            return Ok(SteadyReport {
                state,
                residual: res,
                sector,
                unknowns,
                bandwidth: (0, 0),
                method: SteadyMethod::LongTimeIntegration,
            });
        }
    }
    Err(Error::SteadyStateNotConverged(format!("long-time integration stopped at t = {t:e} s")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_squeezing_model, cooling_model, squeezed_frame_transform, Frame, ModelParams};
    use crate::observables::{mean_phonon, squeezed_vacuum_fidelity};
    use crate::quantum::{fock_annihilation, Operator};
    use crate::reduced::SqueezeParams;
    use crate::units::mhz;

    #[test]
    fn thermal_bath_gives_thermal_state() {
        let s = SpaceDescriptor::fock(60).unwrap();
        let (g, nth) = (1.0, 2.0);
        let b = fock_annihilation(s);
        let m = LindbladModel::new(s, Frame::AdiabaticReduced, Operator::zeros(s), ModelParams::default())
            .unwrap()
            .with_collapse(b.adjoint(), g * nth)
            .unwrap()
            .with_collapse(b, g * (nth + 1.0))
            .unwrap();
        let r = steady_state_report(&m).unwrap();
        assert_eq!(r.sector, Sector::Charge);
        assert!((mean_phonon(&r.state) - nth).abs() < 1e-6);
    }

    #[test]
    fn squeezed_frame_without_bath_relaxes_to_vacuum() {
        let s = SpaceDescriptor::qubit_fock(20).unwrap();
        let sp = SqueezeParams::new(mhz(1.0), mhz(0.7)).unwrap();
        let m = build_squeezing_model(s, sp.theta1, sp.theta2, mhz(4.0), 0.0, 0.0).unwrap();
        let tm = squeezed_frame_transform(&m, sp.zeta).unwrap();
        let rho = steady_state(&tm).unwrap();
        let idx = s.index(0, 0);
        assert!(rho.to_density_matrix()[(idx, idx)].re > 1.0 - 1e-8);
        // Original frame: the target squeezed vacuum.
        let r = steady_state_report(&m).unwrap();
        assert_eq!(r.sector, Sector::Parity);
        let f = squeezed_vacuum_fidelity(&r.state, sp.zeta);
        assert!(f > 0.99, "fidelity {f}");
    }

    #[test]
    fn degenerate_and_driven_models_are_rejected() {
        let s = SpaceDescriptor::qubit_fock(3).unwrap();
        let closed = cooling_model(s, 1.0, 0.0, 0.0, 0.0, 1.0, false).unwrap();
        assert!(matches!(steady_state(&closed), Err(Error::DegenerateSteadyState(_))));
        let driven = cooling_model(s, 1.0, 1.0, 0.1, 0.5, 1.0, true).unwrap();
        assert!(matches!(steady_state(&driven), Err(Error::Unsupported(_))));
    }

    #[test]
    fn agrees_with_long_integration() {
        let s = SpaceDescriptor::qubit_fock(8).unwrap();
        let m = cooling_model(s, 1.0, 2.0, 0.3, 0.8, 5.0, false).unwrap();
        let ss = steady_state(&m).unwrap();
        let slowest = 0.3;
        let opts = SolverOptions::uniform(10.0 / slowest * 3.0, 2);
        let run = evolve_master(&m, &QuantumState::ground(s), &opts).unwrap();
        assert!((run.final_phonon().unwrap() - mean_phonon(&ss)).abs() < 1e-3);
    }
}
