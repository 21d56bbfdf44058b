//! Executes a scenario: model assembly, the requested solver, optional
//! stationary state and sweep orchestration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_cooling_model, build_squeezing_model, check_validity, squeezed_frame_transform, LindbladModel,
    ValidityReport, Verdict,
};
use crate::observables::ObservableSet;
use crate::quantum::{squeeze_operator, thermal_state, thermal_tail_weight, QuantumState, SpaceDescriptor};
use crate::reduced::{
    adiabatic_rates, evolve_populations, evolve_reduced, rate_equation, rate_equation_fixed_point, reduced_model,
    steady_phonon_closed_form, AdiabaticRates, ClosedFormPhonon,
};
use crate::solver::{
    evolve_master, evolve_trajectories, steady_state_report, Diagnostics, EvolutionResult, Sector, SolverOptions,
    SteadyMethod, StdErrors, TrajectoryConfig,
};
use crate::units::to_mhz;

use super::config::{as_config, Coupling, InitialState, Method, Resolved, ScenarioConfig};

pub const MANIFEST_VERSION: u32 = 1;

/// One time series on the configured sample grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesTable {
    pub t_abs_s: Vec<f64>,
    pub t_dimless: Vec<f64>,
    pub mean_phonon: Vec<f64>,
    pub excited_pop: Vec<f64>,
    pub variance_v: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<StdErrors>,
}

impl SeriesTable {
    fn from_evolution(e: &EvolutionResult, time_rate: f64) -> Self {
        Self {
            t_dimless: e.times.iter().map(|t| t * time_rate / std::f64::consts::TAU).collect(),
            t_abs_s: e.times.clone(),
            mean_phonon: e.mean_phonon.clone(),
            excited_pop: e.excited_pop.clone(),
            variance_v: e.variance_v.clone(),
            std_errors: e.std_errors.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.t_abs_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_abs_s.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub param_value: f64,
    pub steady_phonon: f64,
    pub steady_variance: f64,
    pub eq11_prediction: f64,
    pub validity_min_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyEcho {
    pub mean_phonon: f64,
    pub excited_pop: f64,
    pub variance_v: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezed_vacuum_fidelity: Option<f64>,
    /// "banded-lu", "long-time-integration", "closed-form" or "final-sample".
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<Sector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HandoffEcho {
    pub t_s: f64,
    pub t_dimless: f64,
    pub mean_phonon: f64,
    /// Weight above the working cutoff dropped when truncating.
    pub discarded_weight: f64,
}

/// SI values behind the config, echoed so the unit conversions are visible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEcho {
    pub omega_rad_s: f64,
    pub mass_kg: f64,
    pub zero_point_m: f64,
    pub bare_coupling_rad_s: f64,
    pub bare_coupling_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quoted_bare_coupling_mhz: Option<f64>,
    pub qubit_gap_rad_s: f64,
    pub qubit_relaxation_rad_s: f64,
    pub mech_damping_rad_s: f64,
    pub thermal_occupation: f64,
    pub qubit_occupation: f64,
    pub coupling: Coupling,
    pub t_final_s: f64,
}

impl ResolvedEcho {
    fn new(r: &Resolved, quoted: Option<f64>) -> Self {
        let d = &r.derived;
        Self {
            omega_rad_s: d.omega,
            mass_kg: d.mass,
            zero_point_m: d.zero_point,
            bare_coupling_rad_s: d.bare_coupling,
            bare_coupling_mhz: to_mhz(d.bare_coupling),
            quoted_bare_coupling_mhz: quoted,
            qubit_gap_rad_s: d.qubit_gap,
            qubit_relaxation_rad_s: r.qubit.relaxation,
            mech_damping_rad_s: d.mech_damping,
            thermal_occupation: d.thermal_occupation,
            qubit_occupation: d.qubit_occupation,
            coupling: r.coupling,
            t_final_s: r.t_final_s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub param_value: f64,
    pub seed: u64,
    pub validity: ValidityReport,
    pub steady: SteadyEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormPhonon>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: u32,
    pub code_version: String,
    pub name: String,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub resolved: ResolvedEcho,
    pub validity: ValidityReport,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_points: Vec<PointReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<ClosedFormPhonon>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub handoff: Option<HandoffEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckOutcome>,
    /// Human-readable warnings, e.g. sweep points outside the guarded regime.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultBundle {
    pub manifest: Manifest,
    pub series: Option<SeriesTable>,
    pub summary: Vec<SummaryRow>,
}

impl ResultBundle {
    /// Any validity check or sweep point with a hard failure.
    pub fn has_validity_failure(&self) -> bool {
        self.manifest.validity.has_failure() || self.manifest.sweep_points.iter().any(|p| p.validity.has_failure())
    }

    pub fn failed_checks(&self) -> Vec<&CheckOutcome> {
        self.manifest.checks.iter().filter(|c| !c.pass).collect()
    }
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    if cfg.sweep.is_some() {
        return run_sweep(cfg);
    }
    let r = cfg.resolve()?;
    let validity = validity_of(&r);
    let seed = cfg.solver.seed;
    let (series, handoff, diagnostics) = run_series(cfg, &r, seed)?;
    let steady = if cfg.solver.steady_state { Some(steady_of(cfg, &r, seed, Some(&series))?) } else { None };
    let closed_form = closed_form_of(&r)?;
    let summary = vec![SummaryRow {
        param_value: f64::NAN,
        steady_phonon: steady.as_ref().map_or(f64::NAN, |s| s.mean_phonon),
        steady_variance: steady.as_ref().map_or(f64::NAN, |s| s.variance_v),
        eq11_prediction: closed_form.map_or(f64::NAN, |c| c.exact),
        validity_min_ratio: validity.min_ratio(),
    }];
    let checks = expectation_checks(cfg, &series);
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        name: cfg.name.clone(),
        seed,
        config: cfg.clone(),
        resolved: ResolvedEcho::new(&r, cfg.physical.quoted_bare_coupling_mhz),
        validity,
        sweep_points: Vec::new(),
        closed_form,
        steady,
        handoff,
        diagnostics,
        checks,
        flags: Vec::new(),
    };
    Ok(ResultBundle { manifest, series: Some(series), summary })
}

/// One stationary solve per grid point, in parallel; rows keep grid order.
pub fn run_sweep(cfg: &ScenarioConfig) -> Result<ResultBundle> {
    cfg.validate()?;
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("run_sweep needs a sweep block".into()))?;
    let base = cfg.resolve()?;
    let seed = cfg.solver.seed;
    let points: Vec<Result<PointReport>> = sweep
        .values
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let point_cfg = cfg.with_parameter(sweep.parameter, v);
            let r = point_cfg.resolve()?;
            let s = point_seed(seed, k);
            let steady = steady_of(&point_cfg, &r, s, None)?;
            Ok(PointReport { param_value: v, seed: s, validity: validity_of(&r), steady, closed_form: closed_form_of(&r)? })
        })
        .collect();
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let mut flags = Vec::new();
    if sweep.regime_guard {
        for p in &points {
            if let Some(c) = p.validity.get("counter_rotating_heating") {
                if c.verdict != Verdict::Pass {
                    let msg = format!(
                        "point {}: counter-rotating heating not negligible ({} ratio {:.3}, {:?})",
                        p.param_value, c.condition, c.ratio, c.verdict
                    );
                    log::warn!("{msg}");
                    flags.push(msg);
                }
            }
        }
    }
    let summary = points
        .iter()
        .map(|p| SummaryRow {
            param_value: p.param_value,
            steady_phonon: p.steady.mean_phonon,
            steady_variance: p.steady.variance_v,
            eq11_prediction: p.closed_form.map_or(f64::NAN, |c| c.exact),
            validity_min_ratio: p.validity.min_ratio(),
        })
        .collect();
    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        name: cfg.name.clone(),
        seed,
        config: cfg.clone(),
        resolved: ResolvedEcho::new(&base, cfg.physical.quoted_bare_coupling_mhz),
        validity: validity_of(&base),
        sweep_points: points,
        closed_form: closed_form_of(&base)?,
        steady: None,
        handoff: None,
        diagnostics: None,
        checks: Vec::new(),
        flags,
    };
    Ok(ResultBundle { manifest, series: None, summary })
}

/// Per-point seed, a SplitMix64 hash of the master seed and the grid index.
pub fn point_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn validity_of(r: &Resolved) -> ValidityReport {
    match &r.coupling {
        Coupling::Cooling { .. } => check_validity(&r.derived, r.qubit.relaxation, None),
        Coupling::Squeezing(s) => check_validity(&r.derived, r.qubit.relaxation, Some(s)),
    }
}

fn closed_form_of(r: &Resolved) -> Result<Option<ClosedFormPhonon>> {
    match r.coupling {
        Coupling::Cooling { g } => {
            let d = &r.derived;
            steady_phonon_closed_form(d.thermal_occupation, d.mech_damping, g, r.qubit.relaxation).map(Some).map_err(as_config)
        }
        Coupling::Squeezing(_) => Ok(None),
    }
}

fn cooling_rates(r: &Resolved) -> Result<AdiabaticRates> {
    match r.coupling {
        Coupling::Cooling { g } => Ok(adiabatic_rates(g, r.qubit.relaxation, r.derived.omega)),
        Coupling::Squeezing(_) => {
            Err(Error::Config("the reduced and rate-equation solvers describe the cooling drive only".into()))
        }
    }
}

/// The qubit ⊗ oscillator model of the configured drive.
pub fn build_model(cfg: &ScenarioConfig, r: &Resolved, fock_cutoff: usize) -> Result<LindbladModel> {
    let space = SpaceDescriptor::qubit_fock(fock_cutoff)?;
    let d = &r.derived;
    match &r.coupling {
        Coupling::Cooling { .. } => build_cooling_model(d, r.qubit.relaxation, cfg.model.include_anti_jc, space),
        Coupling::Squeezing(s) => {
            build_squeezing_model(space, s.theta1, s.theta2, r.qubit.relaxation, d.mech_damping, d.thermal_occupation)
        }
    }
    .map_err(as_config)
}

pub fn solver_options(cfg: &ScenarioConfig, times: &[f64]) -> SolverOptions {
    let s = &cfg.solver;
    let t0 = times[0];
    let t1 = *times.last().expect("non-empty grid");
    let mut o = SolverOptions::uniform_from(t0, t1, 2).with_integrator(s.integrator);
    o.sample_times = times.to_vec();
    o.tolerance = s.tolerance;
    o.dt = s.dt_s;
    o
}

fn initial_phonon(cfg: &ScenarioConfig, r: &Resolved) -> f64 {
    match cfg.initial_state {
        InitialState::Thermal { n_th } => n_th.unwrap_or(r.derived.thermal_occupation),
        InitialState::Vacuum => 0.0,
        InitialState::Fock { n } => n as f64,
    }
}

fn initial_state(cfg: &ScenarioConfig, r: &Resolved, space: SpaceDescriptor) -> Result<QuantumState> {
    match cfg.initial_state {
        InitialState::Vacuum => Ok(QuantumState::ground(space)),
        InitialState::Fock { n } => QuantumState::basis(space, 0, n).map_err(as_config),
        InitialState::Thermal { .. } => thermal_state(initial_phonon(cfg, r), space).map_err(as_config),
    }
}

struct Precool {
    prefix: SeriesTable,
    /// Index into the sample grid where the full model takes over.
    index: usize,
    state: QuantumState,
    echo: HandoffEcho,
}

/// Oscillator-only pre-cooling of a hot thermal start, if the config asks for
/// it and the start does not already fit the working cutoff.
fn precool(cfg: &ScenarioConfig, r: &Resolved) -> Result<Option<Precool>> {
    let (Some(h), InitialState::Thermal { .. }) = (&cfg.solver.handoff, &cfg.initial_state) else {
        return Ok(None);
    };
    let n_max = cfg.solver.fock_cutoff;
    let n0 = initial_phonon(cfg, r);
    if thermal_tail_weight(n0, n_max) <= h.tail_tolerance {
        return Ok(None);
    }
    let rates = cooling_rates(r)?;
    let d = &r.derived;
    let up = rates.heating_rate() + d.thermal_occupation * d.mech_damping;
    let down = rates.a_minus + (d.thermal_occupation + 1.0) * d.mech_damping;
    let big = SpaceDescriptor::fock(h.fock_cutoff)?;
    let mu0 = thermal_state(n0, big).map_err(as_config)?.to_density_matrix();
    let p0: Vec<f64> = (0..big.dim()).map(|i| mu0[(i, i)].re).collect();
    let times = &r.sample_times_s;
    let pops = evolve_populations(up, down, &p0, &solver_options(cfg, times))?;
    let tail = |p: &[f64]| p[n_max + 1..].iter().sum::<f64>();
    let index = pops.populations.iter().position(|p| tail(p) < h.tail_tolerance).ok_or_else(|| {
        Error::Config(format!(
            "pre-cooling never brings the weight above level {n_max} below {:e} within the run; raise fock_cutoff or t_final",
            h.tail_tolerance
        ))
    })?;
    let top = big.fock_cutoff();
    let moments = |p: &[f64]| {
        let n: f64 = p.iter().enumerate().map(|(k, w)| k as f64 * w).sum();
        (n, 2.0 * n + 1.0 - p[top] * (top as f64 + 1.0))
    };
    let (mean_phonon, variance_v): (Vec<f64>, Vec<f64>) = pops.populations[..index].iter().map(|p| moments(p)).unzip();
    let rate = r.coupling.time_unit_rate();
    let t_abs_s = times[..index].to_vec();
    let prefix = SeriesTable {
        t_dimless: t_abs_s.iter().map(|t| t * rate / std::f64::consts::TAU).collect(),
        t_abs_s,
        excited_pop: vec![f64::NAN; index],
        mean_phonon,
        variance_v,
        std_errors: None,
    };
    let p = &pops.populations[index];
    let discarded = tail(p);
    let kept: f64 = p[..=n_max].iter().sum();
    let space = SpaceDescriptor::qubit_fock(n_max)?;
    let mut rho = nalgebra::DMatrix::zeros(space.dim(), space.dim());
    for (n, w) in p[..=n_max].iter().enumerate() {
        let i = space.index(0, n);
        rho[(i, i)] = crate::quantum::C64::new(w / kept, 0.0);
    }
    let state = QuantumState::density(space, rho)?;
    let echo = HandoffEcho {
        t_s: times[index],
        t_dimless: times[index] * rate / std::f64::consts::TAU,
        mean_phonon: moments(p).0,
        discarded_weight: discarded,
    };
    log::info!("handoff to the full model at t = {:.3e} s (n̄ = {:.4}, discarded {:.1e})", echo.t_s, echo.mean_phonon, discarded);
    Ok(Some(Precool { prefix, index, state, echo }))
}

fn run_series(
    cfg: &ScenarioConfig,
    r: &Resolved,
    seed: u64,
) -> Result<(SeriesTable, Option<HandoffEcho>, Option<Diagnostics>)> {
    let times = &r.sample_times_s;
    let rate = r.coupling.time_unit_rate();
    let n_max = cfg.solver.fock_cutoff;
    let d = &r.derived;
    match cfg.solver.method {
        Method::Master | Method::Trajectory => {
            let model = build_model(cfg, r, n_max)?;
            let (prefix, echo, start, rho0) = match precool(cfg, r)? {
                Some(p) => (Some(p.prefix), Some(p.echo), p.index, p.state),
                None => (None, None, 0, initial_state(cfg, r, model.space)?),
            };
            let opts = solver_options(cfg, &times[start..]);
            let evo = if cfg.solver.method == Method::Master {
                evolve_master(&model, &rho0, &opts)?
            } else {
                let tcfg = TrajectoryConfig { n_trajectories: cfg.solver.trajectories, master_seed: seed };
                evolve_trajectories(&model, &rho0, &opts, &tcfg).map_err(unsupported_as_config)?
            };
            let tail = SeriesTable::from_evolution(&evo, rate);
            let series = match prefix {
                Some(p) => join(p, tail),
                None => tail,
            };
            Ok((series, echo, Some(evo.diagnostics)))
        }
        Method::Reduced => {
            let rates = cooling_rates(r)?;
            // A hot start runs on the big pre-cooling space throughout.
            let cutoff = match (&cfg.solver.handoff, &cfg.initial_state) {
                (Some(h), InitialState::Thermal { .. }) => h.fock_cutoff,
                _ => n_max,
            };
            let space = SpaceDescriptor::fock(cutoff)?;
            let mu0 = initial_state(cfg, r, space)?;
            let evo = evolve_reduced(&rates, d.thermal_occupation, d.mech_damping, &mu0, &solver_options(cfg, times))?;
            Ok((SeriesTable::from_evolution(&evo, rate), None, Some(evo.diagnostics)))
        }
        Method::Rate => {
            let rates = cooling_rates(r)?;
            let n = rate_equation(initial_phonon(cfg, r), d.thermal_occupation, d.mech_damping, rates.a_minus, times)?;
            let k = times.len();
            let series = SeriesTable {
                t_abs_s: times.clone(),
                t_dimless: times.iter().map(|t| t * rate / std::f64::consts::TAU).collect(),
                excited_pop: vec![f64::NAN; k],
                // Thermal-like (phase-free) states: ⟨X²⟩ = 2n̄ + 1.
                variance_v: n.iter().map(|n| 2.0 * n + 1.0).collect(),
                mean_phonon: n,
                std_errors: None,
            };
            Ok((series, None, None))
        }
    }
}

fn join(mut a: SeriesTable, b: SeriesTable) -> SeriesTable {
    let n_a = a.len();
    let n_b = b.len();
    a.t_abs_s.extend(b.t_abs_s);
    a.t_dimless.extend(b.t_dimless);
    a.mean_phonon.extend(b.mean_phonon);
    a.excited_pop.extend(b.excited_pop);
    a.variance_v.extend(b.variance_v);
    a.std_errors = match (a.std_errors, b.std_errors) {
        (None, None) => None,
        (x, y) => {
            let mut x = x.unwrap_or_else(|| StdErrors::nan(n_a));
            let y = y.unwrap_or_else(|| StdErrors::nan(n_b));
            x.mean_phonon.extend(y.mean_phonon);
            x.excited_pop.extend(y.excited_pop);
            x.variance_v.extend(y.variance_v);
            Some(x)
        }
    };
    a
}

fn unsupported_as_config(e: Error) -> Error {
    match e {
        Error::Unsupported(m) => Error::Config(m),
        other => other,
    }
}

/// Stationary observables for the configured solver family.
fn steady_of(cfg: &ScenarioConfig, r: &Resolved, seed: u64, series: Option<&SeriesTable>) -> Result<SteadyEcho> {
    let d = &r.derived;
    let zeta = match &r.coupling {
        Coupling::Squeezing(s) => Some(s.zeta),
        Coupling::Cooling { .. } => None,
    };
    match cfg.solver.method {
        Method::Master => full_steady(cfg, r, zeta),
        Method::Trajectory => {
            // An ensemble has no stationary solve of its own; its last sample
            // stands in (see the series for the approach).
            let owned;
            let s = match series {
                Some(s) => s,
                None => {
                    let mut c = cfg.clone();
                    c.solver.seed = seed;
                    owned = run_series(&c, r, seed)?.0;
                    &owned
                }
            };
            let last = s.len() - 1;
            Ok(SteadyEcho {
                mean_phonon: s.mean_phonon[last],
                excited_pop: s.excited_pop[last],
                variance_v: s.variance_v[last],
                squeezed_vacuum_fidelity: None,
                method: "final-sample".into(),
                residual: None,
                sector: None,
            })
        }
        Method::Reduced => {
            let rates = cooling_rates(r)?;
            let m = reduced_model(&rates, d.thermal_occupation, d.mech_damping, SpaceDescriptor::fock(cfg.solver.fock_cutoff)?)?;
            let rep = steady_state_report(&m)?;
            let o = ObservableSet::of(&rep.state, None);
            Ok(SteadyEcho {
                mean_phonon: o.mean_phonon,
                excited_pop: f64::NAN,
                variance_v: o.variance_v,
                squeezed_vacuum_fidelity: None,
                method: method_name(rep.method).into(),
                residual: Some(rep.residual),
                sector: Some(rep.sector),
            })
        }
        Method::Rate => {
            let rates = cooling_rates(r)?;
            let n = rate_equation_fixed_point(d.thermal_occupation, d.mech_damping, rates.a_minus);
            Ok(SteadyEcho {
                mean_phonon: n,
                excited_pop: f64::NAN,
                variance_v: 2.0 * n + 1.0,
                squeezed_vacuum_fidelity: None,
                method: "closed-form".into(),
                residual: None,
                sector: None,
            })
        }
    }
}

fn method_name(m: SteadyMethod) -> &'static str {
    match m {
        SteadyMethod::BandedLu => "banded-lu",
        SteadyMethod::LongTimeIntegration => "long-time-integration",
    }
}

fn full_steady(cfg: &ScenarioConfig, r: &Resolved, zeta: Option<f64>) -> Result<SteadyEcho> {
    let model = build_model(cfg, r, cfg.solver.fock_cutoff)?;
    if model.is_time_dependent() {
        log::warn!("the counter-rotating drive makes the model time-dependent; no stationary state reported");
        return Ok(SteadyEcho {
            mean_phonon: f64::NAN,
            excited_pop: f64::NAN,
            variance_v: f64::NAN,
            squeezed_vacuum_fidelity: None,
            method: "none".into(),
            residual: None,
            sector: None,
        });
    }
    let (state, rep) = match zeta {
        Some(z) if cfg.model.squeezed_frame => {
            let rotated = squeezed_frame_transform(&model, z)?;
            let rep = steady_state_report(&rotated)?;
            let s = squeeze_operator(z, model.space);
            let rho = s.matrix() * rep.state.to_density_matrix() * s.matrix().adjoint();
            (QuantumState::density(model.space, rho)?, rep)
        }
        _ => {
            let rep = steady_state_report(&model)?;
            (rep.state.clone(), rep)
        }
    };
    let o = ObservableSet::of(&state, zeta);
    Ok(SteadyEcho {
        mean_phonon: o.mean_phonon,
        excited_pop: o.excited_pop,
        variance_v: o.variance_v,
        squeezed_vacuum_fidelity: o.fidelity,
        method: method_name(rep.method).into(),
        residual: Some(rep.residual),
        sector: Some(rep.sector),
    })
}

fn expectation_checks(cfg: &ScenarioConfig, s: &SeriesTable) -> Vec<CheckOutcome> {
    let Some(e) = &cfg.expect else { return Vec::new() };
    let mut out = Vec::new();
    if let (Some([lo, hi]), Some(&n)) = (e.final_phonon_band, s.mean_phonon.last()) {
        out.push(CheckOutcome { name: "final_phonon".into(), value: n, bound: format!("[{lo}, {hi}]"), pass: n >= lo && n <= hi });
    }
    if let Some(max) = e.max_excited_pop {
        let p = s.excited_pop.iter().copied().filter(|x| !x.is_nan()).fold(f64::NEG_INFINITY, f64::max);
        out.push(CheckOutcome { name: "max_excited_pop".into(), value: p, bound: format!("< {max}"), pass: p < max });
    }
    if let (Some(max), Some(&v)) = (e.max_final_variance, s.variance_v.last()) {
        out.push(CheckOutcome { name: "final_variance".into(), value: v, bound: format!("< {max}"), pass: v < max });
    }
    out
}
