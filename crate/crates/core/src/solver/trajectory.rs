//! Quantum-jump unravelling of the master equation.
//!
//! Each trajectory integrates `dψ/dt = −iH_eff ψ` without renormalising and
//! jumps when ‖ψ‖² falls below a uniform random threshold; the jump time is
//! then located by bisection inside the step.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::LindbladModel;
use crate::observables::{Moments, Probe};
use crate::quantum::{QuantumState, C64};

use super::generator::Generator;
use super::options::{SolverOptions, TrajectoryConfig};
use super::result::{Diagnostics, EvolutionResult, StdErrors};

const BISECTION_STEPS: usize = 60;

pub fn evolve_trajectories(
    model: &LindbladModel,
    psi0: &QuantumState,
    opts: &SolverOptions,
    tcfg: &TrajectoryConfig,
) -> Result<EvolutionResult> {
    opts.validate()?;
    tcfg.validate()?;
    model.space.ensure_same(&psi0.space())?;
    if model.has_cross_terms() {
        return Err(Error::Unsupported(
            "trajectory unravelling of off-diagonal dissipator blocks; use the master-equation solver".into(),
        ));
    }
    let gen = Generator::new(model);
    let probe = Probe::new(model.space);
    let initial = InitialEnsemble::new(psi0);
    let dt = opts.dt.unwrap_or_else(|| gen.default_dt());

    let runs: Vec<Result<Run>> = (0..tcfg.n_trajectories)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(tcfg.master_seed);
            rng.set_stream(k as u64);
            let psi = initial.sample(&mut rng);
            run_one(&gen, &probe, psi, opts, dt, &mut rng)
        })
        .collect();
    // Ordered reduction: the result does not depend on how rayon split the work.
    let mut ok = Vec::with_capacity(runs.len());
    for r in runs {
        ok.push(r?);
    }
    Ok(reduce(model, opts, &ok))
}

struct InitialEnsemble {
    weights: Vec<f64>,
    vectors: Vec<DVector<C64>>,
}

impl InitialEnsemble {
    fn new(state: &QuantumState) -> Self {
        if let Some(psi) = state.as_pure() {
            return Self { weights: vec![1.0], vectors: vec![psi.clone()] };
        }
        let rho = state.as_density().expect("density");
        let d = rho.nrows();
        let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || rho[(i, j)] == C64::new(0.0, 0.0)));
        let (weights, vectors) = if diagonal {
            (0..d)
                .filter(|&i| rho[(i, i)].re > 0.0)
                .map(|i| {
                    let mut v = DVector::zeros(d);
                    v[i] = C64::new(1.0, 0.0);
                    (rho[(i, i)].re, v)
                })
                .unzip()
        } else {
            let h = (rho + rho.adjoint()) * C64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(h);
            (0..d)
                .filter(|&i| eig.eigenvalues[i] > 0.0)
                .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).into_owned()))
                .unzip()
        };
        Self { weights, vectors }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> DVector<C64> {
        if self.vectors.len() == 1 {
            return self.vectors[0].clone();
        }
        let total: f64 = self.weights.iter().sum();
        let mut u = rng.random::<f64>() * total;
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            if u < *w {
                return v.clone();
            }
            u -= w;
        }
        self.vectors.last().expect("non-empty ensemble").clone()
    }
}

struct Run {
    samples: Vec<Moments>,
    final_psi: DVector<C64>,
    jumps: usize,
    steps: usize,
}

struct Work {
    k: [DVector<C64>; 4],
    tmp: DVector<C64>,
}

fn rk4(gen: &Generator, psi: &DVector<C64>, t: f64, h: f64, w: &mut Work, out: &mut DVector<C64>) {
    let hc = |x: f64| C64::new(x, 0.0);
    let Work { k, tmp } = w;
    gen.apply_nonhermitian(t, psi, &mut k[0]);
    tmp.copy_from(psi);
    tmp.axpy(hc(0.5 * h), &k[0], hc(1.0));
    gen.apply_nonhermitian(t + 0.5 * h, tmp, &mut k[1]);
    tmp.copy_from(psi);
    tmp.axpy(hc(0.5 * h), &k[1], hc(1.0));
    gen.apply_nonhermitian(t + 0.5 * h, tmp, &mut k[2]);
    tmp.copy_from(psi);
    tmp.axpy(hc(h), &k[2], hc(1.0));
    gen.apply_nonhermitian(t + h, tmp, &mut k[3]);
    out.copy_from(psi);
    out.axpy(hc(h / 6.0), &k[0], hc(1.0));
    out.axpy(hc(h / 3.0), &k[1], hc(1.0));
    out.axpy(hc(h / 3.0), &k[2], hc(1.0));
    out.axpy(hc(h / 6.0), &k[3], hc(1.0));
}

fn run_one(
    gen: &Generator,
    probe: &Probe,
    mut psi: DVector<C64>,
    opts: &SolverOptions,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Run> {
    let d = gen.dim();
    let can_jump = !gen.jumps.is_empty();
    let mut w = Work { k: std::array::from_fn(|_| DVector::zeros(d)), tmp: DVector::zeros(d) };
    let mut next = DVector::zeros(d);
    let mut threshold: f64 = rng.random();
    let mut t = opts.t_start;
    let mut run = Run { samples: Vec::with_capacity(opts.sample_times.len()), final_psi: DVector::zeros(d), jumps: 0, steps: 0 };

    let targets = opts.sample_times.iter().copied().map(Some).chain(std::iter::once(None));
    for target in targets {
        let goal = target.unwrap_or(opts.t_final);
        while t < goal {
            let remaining = goal - t;
            let h = if dt >= remaining * (1.0 - 1e-12) { remaining } else { dt };
            rk4(gen, &psi, t, h, &mut w, &mut next);
            run.steps += 1;
            let norm_sq = next.norm_squared();
            if !(norm_sq.is_finite() && norm_sq > 1e-300) {
                return Err(Error::NormUnderflow { t: t + h, norm_sq });
            }
            if can_jump && norm_sq < threshold {
                // Find τ with ‖ψ(t+τ)‖² = threshold.
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..BISECTION_STEPS {
                    let mid = 0.5 * (lo + hi);
                    rk4(gen, &psi, t, mid, &mut w, &mut next);
                    if next.norm_squared() < threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                rk4(gen, &psi, t, hi, &mut w, &mut next);
                t = if hi == remaining { goal } else { t + hi };
                psi = jump(gen, &next, rng, t)?;
                run.jumps += 1;
                threshold = rng.random();
            } else {
                std::mem::swap(&mut psi, &mut next);
                t = if h == remaining { goal } else { t + h };
            }
        }
        if target.is_some() {
            run.samples.push(probe.pure(&psi));
        }
    }
    run.final_psi = psi.unscale(psi.norm());
    Ok(run)
}

fn jump(gen: &Generator, psi: &DVector<C64>, rng: &mut ChaCha8Rng, t: f64) -> Result<DVector<C64>> {
    let candidates: Vec<DVector<C64>> = gen
        .jumps
        .iter()
        .map(|j| {
            let mut v = DVector::zeros(psi.len());
            j.matvec_acc(psi, C64::new(1.0, 0.0), &mut v);
            v
        })
        .collect();
    let weights: Vec<f64> = candidates.iter().map(|v| v.norm_squared()).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NormUnderflow { t, norm_sq: psi.norm_squared() });
    }
    let mut u = rng.random::<f64>() * total;
    let mut chosen = candidates.len() - 1;
    for (i, w) in weights.iter().enumerate() {
        if *w > 0.0 && u < *w {
            chosen = i;
            break;
        }
        u -= w;
    }
    let v = &candidates[chosen];
    Ok(v.unscale(weights[chosen].sqrt()))
}

fn reduce(model: &LindbladModel, opts: &SolverOptions, runs: &[Run]) -> EvolutionResult {
    let n = runs.len() as f64;
    let len = opts.sample_times.len();
    let mut out = EvolutionResult {
        times: opts.sample_times.clone(),
        mean_phonon: Vec::with_capacity(len),
        excited_pop: Vec::with_capacity(len),
        variance_v: Vec::with_capacity(len),
        std_errors: Some(StdErrors::default()),
        final_state: QuantumState::ground(model.space),
        diagnostics: Diagnostics::default(),
    };
    let se = out.std_errors.as_mut().expect("set above");
    for s in 0..len {
        let col = |f: fn(&Moments) -> f64| -> Vec<f64> { runs.iter().map(|r| f(&r.samples[s])).collect() };
        let (ns, ps, xs, x2s) = (col(|m| m.n), col(|m| m.p), col(|m| m.x), col(|m| m.x2));
        let (mn, sn) = mean_stderr(&ns);
        let (mp, sp) = mean_stderr(&ps);
        let (mx, _) = mean_stderr(&xs);
        let (mx2, _) = mean_stderr(&x2s);
        // Linearised error of ⟨X²⟩ − ⟨X⟩² about the ensemble means.
        let ys: Vec<f64> = xs.iter().zip(&x2s).map(|(x, x2)| x2 - 2.0 * mx * x).collect();
        let (_, sv) = mean_stderr(&ys);
        out.mean_phonon.push(mn);
        out.excited_pop.push(mp);
        out.variance_v.push(mx2 - mx * mx);
        se.mean_phonon.push(sn);
        se.excited_pop.push(sp);
        se.variance_v.push(sv);
    }
    let d = model.space.dim();
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for r in runs {
        rho.ger(C64::new(1.0 / n, 0.0), &r.final_psi, &r.final_psi, C64::new(1.0, 0.0));
    }
    out.final_state = QuantumState::density_unchecked(model.space, rho);
    out.diagnostics.jumps = runs.iter().map(|r| r.jumps).sum();
    out.diagnostics.steps = runs.iter().map(|r| r.steps).sum();
    out.diagnostics.min_eigenvalue = 0.0;
    out
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
