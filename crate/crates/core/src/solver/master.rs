//! Density-matrix integration of the master equation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::LindbladModel;
use crate::observables::{Moments, Probe};
use crate::quantum::{QuantumState, C64};

use super::generator::Generator;
use super::options::{Integrator, SolverOptions};
use super::result::{Diagnostics, EvolutionResult};

pub fn evolve_master(model: &LindbladModel, rho0: &QuantumState, opts: &SolverOptions) -> Result<EvolutionResult> {
    opts.validate()?;
    model.space.ensure_same(&rho0.space())?;
    let gen = Generator::new(model);
    let probe = Probe::new(model.space);
    let mut rho = rho0.to_density_matrix();
    let mut stepper = Stepper::new(&gen, opts);
    let mut monitor = Monitor::new(opts);
    let mut samples = Vec::with_capacity(opts.sample_times.len());

    let mut t = opts.t_start;
    for &ts in &opts.sample_times {
        stepper.advance(&mut rho, &mut t, ts)?;
        monitor.check(t, &rho)?;
        samples.push(probe.density(&rho));
    }
    stepper.advance(&mut rho, &mut t, opts.t_final)?;
    monitor.check(t, &rho)?;

    let mut diagnostics = monitor.diagnostics;
    diagnostics.steps = stepper.steps;
    diagnostics.rejected_steps = stepper.rejected;
    Ok(assemble(opts, &samples, QuantumState::density_unchecked(model.space, rho), diagnostics))
}

pub(super) fn assemble(
    opts: &SolverOptions,
    samples: &[Moments],
    final_state: QuantumState,
    diagnostics: Diagnostics,
) -> EvolutionResult {
    EvolutionResult {
        times: opts.sample_times.clone(),
        mean_phonon: samples.iter().map(|m| m.n).collect(),
        excited_pop: samples.iter().map(|m| m.p).collect(),
        variance_v: samples.iter().map(|m| m.variance()).collect(),
        std_errors: None,
        final_state,
        diagnostics,
    }
}

/// Trace, Hermiticity and positivity bookkeeping at sample times.
pub(super) struct Monitor {
    trace_tol: f64,
    positivity_tol: f64,
    pub diagnostics: Diagnostics,
}

impl Monitor {
    pub fn new(opts: &SolverOptions) -> Self {
        Self {
            trace_tol: opts.trace_tolerance,
            positivity_tol: opts.positivity_tolerance,
            diagnostics: Diagnostics { min_eigenvalue: f64::INFINITY, ..Default::default() },
        }
    }

    pub fn check(&mut self, t: f64, rho: &DMatrix<C64>) -> Result<()> {
        let trace = rho.trace().re;
        let d = &mut self.diagnostics;
        d.max_trace_error = d.max_trace_error.max((trace - 1.0).abs());
        let herm = rho.iter().zip(rho.adjoint().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        d.max_hermiticity_error = d.max_hermiticity_error.max(herm);
        let min_eig = crate::quantum::hermitian_min_eigenvalue(rho);
        d.min_eigenvalue = d.min_eigenvalue.min(min_eig);
        if !trace.is_finite() || (trace - 1.0).abs() > self.trace_tol {
            return Err(Error::TraceViolation { t, trace });
        }
        if !(min_eig >= -self.positivity_tol) {
            return Err(Error::PositivityViolation { t, min_eigenvalue: min_eig });
        }
        Ok(())
    }
}

/// `y += a·x` elementwise.
fn axpy(y: &mut DMatrix<C64>, a: C64, x: &DMatrix<C64>) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += a * xi;
    }
}

struct Buffers {
    k: Vec<DMatrix<C64>>,
    tmp: DMatrix<C64>,
    scratch: DMatrix<C64>,
}

struct Stepper<'a> {
    gen: &'a Generator,
    integrator: Integrator,
    dt: f64,
    tolerance: f64,
    buf: Buffers,
    steps: usize,
    rejected: usize,
}

impl<'a> Stepper<'a> {
    fn new(gen: &'a Generator, opts: &SolverOptions) -> Self {
        let d = gen.dim();
        let stages = match opts.integrator {
            Integrator::Rk4 => 4,
            Integrator::Rk45 => 7,
        };
        Self {
            gen,
            integrator: opts.integrator,
            dt: opts.dt.unwrap_or_else(|| gen.default_dt()),
            tolerance: opts.tolerance,
            buf: Buffers { k: vec![DMatrix::zeros(d, d); stages], tmp: DMatrix::zeros(d, d), scratch: DMatrix::zeros(d, d) },
            steps: 0,
            rejected: 0,
        }
    }

    fn advance(&mut self, rho: &mut DMatrix<C64>, t: &mut f64, target: f64) -> Result<()> {
        if target <= *t {
            return Ok(());
        }
        match self.integrator {
            Integrator::Rk4 => {
                let span = target - *t;
                // Equal sub-steps that land on the target exactly.
                let n = if self.dt.is_finite() { (span / self.dt).ceil().max(1.0) as usize } else { 1 };
                let h = span / n as f64;
                let t0 = *t;
                for i in 0..n {
                    self.rk4_step(rho, t0 + i as f64 * h, h);
                }
                self.steps += n;
                *t = target;
                Ok(())
            }
            Integrator::Rk45 => self.adaptive(rho, t, target),
        }
    }

    fn rk4_step(&mut self, rho: &mut DMatrix<C64>, t: f64, h: f64) {
        let Buffers { k, tmp, scratch } = &mut self.buf;
        let g = self.gen;
        let hc = |x: f64| C64::new(x, 0.0);
        g.apply(t, rho, &mut k[0], scratch);
        tmp.copy_from(rho);
        axpy(tmp, hc(0.5 * h), &k[0]);
        g.apply(t + 0.5 * h, tmp, &mut k[1], scratch);
        tmp.copy_from(rho);
        axpy(tmp, hc(0.5 * h), &k[1]);
        g.apply(t + 0.5 * h, tmp, &mut k[2], scratch);
        tmp.copy_from(rho);
        axpy(tmp, hc(h), &k[2]);
        g.apply(t + h, tmp, &mut k[3], scratch);
        axpy(rho, hc(h / 6.0), &k[0]);
        axpy(rho, hc(h / 3.0), &k[1]);
        axpy(rho, hc(h / 3.0), &k[2]);
        axpy(rho, hc(h / 6.0), &k[3]);
    }

    fn adaptive(&mut self, rho: &mut DMatrix<C64>, t: &mut f64, target: f64) -> Result<()> {
        let min_h = 1e-14 * target.abs().max(1e-300);
        while *t < target {
            let mut h = self.dt.min(target - *t);
            let last = h >= target - *t;
            if h < min_h {
                return Err(Error::StepUnderflow { t: *t, h });
            }
            let err = self.dopri_trial(rho, *t, h);
            if err <= 1.0 {
                // Accept: the 5th-order solution is in tmp.
                rho.copy_from(&self.buf.tmp);
                *t = if last { target } else { *t + h };
                self.steps += 1;
            } else {
                self.rejected += 1;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            // Keep the preferred step across sample points rather than the
            // clipped one used to land on them.
            if !last || err > 1.0 {
                self.dt = h;
            }
        }
        Ok(())
    }

    /// One Dormand–Prince trial step from `rho`; leaves the 5th-order result
    /// in `tmp` and returns the scaled error norm.
    fn dopri_trial(&mut self, rho: &DMatrix<C64>, t: f64, h: f64) -> f64 {
        const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        const A: [[f64; 6]; 7] = [
            [0.0; 6],
            [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        // 5th-order weights are the last row of A; these are 5th − 4th.
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let Buffers { k, tmp, scratch } = &mut self.buf;
        let hc = |x: f64| C64::new(x, 0.0);
        for s in 0..7 {
            tmp.copy_from(rho);
            for (j, &a) in A[s].iter().enumerate().take(s) {
                if a != 0.0 {
                    axpy(tmp, hc(h * a), &k[j]);
                }
            }
            self.gen.apply(t + C[s] * h, tmp, &mut k[s], scratch);
        }
        // Stage 7 was evaluated at the 5th-order point, which tmp still holds.
        let mut err: f64 = 0.0;
        for i in 0..rho.len() {
            let mut e = C64::new(0.0, 0.0);
            for (s, &w) in E.iter().enumerate() {
                if w != 0.0 {
                    e += k[s][i] * w;
                }
            }
            let scale = self.tolerance * (1.0 + rho[i].norm().max(tmp[i].norm()));
            err = err.max((e * h).norm() / scale);
        }
        err
    }
}
