//! The oscillator-only master equation left after eliminating the qubit.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{Frame, LindbladModel, ModelParams};
use crate::quantum::{fock_annihilation, QuantumState, SpaceDescriptor, C64};
use crate::solver::{evolve_master, Diagnostics, EvolutionResult, SolverOptions};

use super::closed_form::AdiabaticRates;

/// `dμ/dt = D[b†, A₊ + n_thγ]μ + D[b, A₋ + (n_th+1)γ]μ` on an oscillator-only space.
///
/// A₊ is complex; its real part is a rate and its imaginary part only shifts
/// the oscillator frequency, so it becomes the Hamiltonian `(Im A₊/2) b b†`.
pub fn reduced_model(rates: &AdiabaticRates, n_th: f64, gamma_m: f64, space: SpaceDescriptor) -> Result<LindbladModel> {
    if space.has_qubit() {
        return Err(Error::invalid(format!("reduced model lives on an oscillator-only space, got {space}")));
    }
    let b = fock_annihilation(space);
    let bd = b.adjoint();
    let h = (&b * &bd).scale_real(0.5 * rates.a_plus.im);
    let params = ModelParams { mech_damping: gamma_m, thermal_occupation: n_th, ..Default::default() };
    LindbladModel::new(space, Frame::AdiabaticReduced, h, params)?
        .with_collapse(bd, rates.heating_rate() + n_th * gamma_m)?
        .with_collapse(b, rates.a_minus + (n_th + 1.0) * gamma_m)
}

/// Integrates the reduced equation from `mu0`.
///
/// The Hamiltonian and both channels map diagonal states to diagonal states,
/// so a diagonal `mu0` is propagated as a population vector.
pub fn evolve_reduced(
    rates: &AdiabaticRates,
    n_th: f64,
    gamma_m: f64,
    mu0: &QuantumState,
    opts: &SolverOptions,
) -> Result<EvolutionResult> {
    let space = mu0.space();
    let model = reduced_model(rates, n_th, gamma_m, space)?;
    let rho = mu0.to_density_matrix();
    let d = rho.nrows();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || rho[(i, j)] == C64::new(0.0, 0.0)));
    if !diagonal {
        return evolve_master(&model, mu0, opts);
    }
    let up = rates.heating_rate() + n_th * gamma_m;
    let down = rates.a_minus + (n_th + 1.0) * gamma_m;
    let p0: Vec<f64> = (0..d).map(|i| rho[(i, i)].re).collect();
    let series = evolve_populations(up, down, &p0, opts)?;
    let top = d - 1;
    let moments = |p: &[f64]| -> (f64, f64) {
        let n: f64 = p.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        // ⟨bb† + b†b⟩ on the truncated ladder: bb†|N⟩ = 0.
        let x2 = 2.0 * n + 1.0 - p[top] * (top as f64 + 1.0);
        (n, x2)
    };
    let (mean_phonon, variance_v): (Vec<f64>, Vec<f64>) = series.populations.iter().map(|p| moments(p)).unzip();
    let final_p = &series.final_populations;
    let final_state = QuantumState::density_unchecked(
        space,
        DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(final_p[i], 0.0) } else { C64::new(0.0, 0.0) }),
    );
    let trace_err = series.populations.iter().map(|p| (p.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    let min_p = series.populations.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    Ok(EvolutionResult {
        times: opts.sample_times.clone(),
        excited_pop: vec![f64::NAN; mean_phonon.len()],
        mean_phonon,
        variance_v,
        std_errors: None,
        final_state,
        diagnostics: Diagnostics {
            steps: series.steps,
            max_trace_error: trace_err,
            min_eigenvalue: min_p,
            ..Default::default()
        },
    })
}

#[derive(Clone, Debug)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    /// One population vector per sample time.
    pub populations: Vec<Vec<f64>>,
    pub final_populations: Vec<f64>,
    pub steps: usize,
}

/// Birth–death equation of the truncated ladder:
/// `ṗ_n = up[n p_{n−1} − (n+1) p_n] + down[(n+1) p_{n+1} − n p_n]`, with
/// no upward flow out of the top level (as with a truncated b†).
pub fn evolve_populations(up: f64, down: f64, p0: &[f64], opts: &SolverOptions) -> Result<PopulationSeries> {
    opts.validate()?;
    if !(up >= 0.0 && down >= 0.0) {
        return Err(Error::invalid("population rates must be ≥ 0"));
    }
    let levels = p0.len();
    let top = levels - 1;
    let deriv = |p: &[f64], out: &mut [f64]| {
        for n in 0..levels {
            let nf = n as f64;
            let mut v = 0.0;
            if n > 0 {
                v += up * nf * p[n - 1] - down * nf * p[n];
            }
            if n < top {
                v += down * (nf + 1.0) * p[n + 1] - up * (nf + 1.0) * p[n];
            }
            out[n] = v;
        }
    };
    // Gershgorin bound on the decay rates; hλ ≤ 0.5 is well inside the RK4
    // stability region and the fast modes it affects are the top-of-ladder ones.
    let stiffness = (up + down) * levels as f64 * 2.0;
    let dt = if stiffness > 0.0 { 0.5 / stiffness } else { f64::INFINITY };
    let mut p = p0.to_vec();
    let mut k: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; levels]);
    let mut tmp = vec![0.0; levels];
    let mut t = opts.t_start;
    let mut steps = 0;
    let mut out = PopulationSeries { times: opts.sample_times.clone(), populations: Vec::new(), final_populations: Vec::new(), steps: 0 };
    let mut advance = |p: &mut Vec<f64>, t: &mut f64, target: f64| {
        if target <= *t {
            return;
        }
        let n = if dt.is_finite() { ((target - *t) / dt).ceil().max(1.0) as usize } else { 1 };
        let h = (target - *t) / n as f64;
        for _ in 0..n {
            deriv(p, &mut k[0]);
            for i in 0..levels {
                tmp[i] = p[i] + 0.5 * h * k[0][i];
            }
            deriv(&tmp, &mut k[1]);
            for i in 0..levels {
                tmp[i] = p[i] + 0.5 * h * k[1][i];
            }
            deriv(&tmp, &mut k[2]);
            for i in 0..levels {
                tmp[i] = p[i] + h * k[2][i];
            }
            deriv(&tmp, &mut k[3]);
            for i in 0..levels {
                p[i] += h / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
            }
        }
        steps += n;
        *t = target;
    };
    for &ts in &opts.sample_times {
        advance(&mut p, &mut t, ts);
        out.populations.push(p.clone());
    }
    advance(&mut p, &mut t, opts.t_final);
    out.final_populations = p;
    out.steps = steps;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::thermal_state;
    use crate::reduced::{adiabatic_rates, rate_equation};
    use crate::units::{khz, mhz};

    fn fock(n: usize) -> SpaceDescriptor {
        SpaceDescriptor::fock(n).unwrap()
    }

    #[test]
    fn zero_rates_thermalise() {
        let rates = AdiabaticRates { a_minus: 0.0, a_plus: C64::new(0.0, 0.0) };
        let mu0 = QuantumState::ground(fock(40));
        let r = evolve_reduced(&rates, 1.5, 1.0, &mu0, &SolverOptions::uniform(30.0, 3)).unwrap();
        assert!((r.final_phonon().unwrap() - 1.5).abs() < 1e-3);
    }

    #[test]
    fn pure_cooling_decays_at_a_minus() {
        let rates = adiabatic_rates(1.0, 4.0, 0.0);
        // ω = 0 makes A₊ = A₋, so switch the heating part off by hand.
        let rates = AdiabaticRates { a_plus: C64::new(0.0, 0.0), ..rates };
        let mu0 = thermal_state(2.0, fock(60)).unwrap();
        let r = evolve_reduced(&rates, 0.0, 0.0, &mu0, &SolverOptions::uniform(4.0, 9)).unwrap();
        let n0 = r.mean_phonon[0];
        for (t, n) in r.times.iter().zip(&r.mean_phonon) {
            assert!((n - n0 * (-rates.a_minus * t).exp()).abs() < 1e-4, "t={t}");
        }
    }

    #[test]
    fn diagonal_fast_path_matches_density_integration() {
        let rates = adiabatic_rates(mhz(1.0), mhz(4.0), mhz(50.0));
        let space = fock(30);
        let mu0 = thermal_state(3.0, space).unwrap();
        let opts = SolverOptions::uniform(2e-6, 5);
        let fast = evolve_reduced(&rates, 41.0, khz(1.0), &mu0, &opts).unwrap();
        let model = reduced_model(&rates, 41.0, khz(1.0), space).unwrap();
        let full = evolve_master(&model, &mu0, &opts).unwrap();
        for (a, b) in fast.mean_phonon.iter().zip(&full.mean_phonon) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
        for (a, b) in fast.variance_v.iter().zip(&full.variance_v) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn agrees_with_rate_equation_from_thermal_start() {
        let (g, gq, w) = (mhz(1.0), mhz(4.0), mhz(50.0));
        let rates = adiabatic_rates(g, gq, w);
        let rates = AdiabaticRates { a_plus: C64::new(0.0, 0.0), ..rates };
        let (nth, gm) = (41.0, khz(1.0));
        let mu0 = thermal_state(nth, fock(400)).unwrap();
        let opts = SolverOptions::uniform(4e-6, 21);
        let r = evolve_reduced(&rates, nth, gm, &mu0, &opts).unwrap();
        let n0 = r.mean_phonon[0];
        let expect = rate_equation(n0, nth, gm, rates.a_minus, &opts.sample_times).unwrap();
        for (a, b) in r.mean_phonon.iter().zip(&expect) {
            assert!((a - b).abs() <= 0.02 * b, "{a} vs {b}");
        }
    }
}
