//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.
//!
//! Tolerances are the ones the criteria state; nothing here is loosened to
//! make a line green.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use cantisim_core::model::cooling_model;
use cantisim_core::observables::{coherent_variance, mean_phonon, squeezed_vacuum_fidelity};
use cantisim_core::quantum::{
    cross_dissipator_matrix, dissipator_matrix, fock_annihilation, squeeze_operator, SpaceDescriptor, C64,
};
use cantisim_core::reduced::{
    adiabatic_rates, rate_equation, reduced_model, residual_dissipator_rates, steady_phonon_closed_form,
};
use cantisim_core::scenario::{preset, run_scenario, Method, ResultBundle, ScenarioConfig, SeriesTable};
use cantisim_core::solver::{steady_state, steady_state_report};
use cantisim_core::units::mhz;
use cantisim_core::QuantumState;
use nalgebra::DMatrix;
use rand::SeedableRng;

/// Closed-form steady phonon number quoted for the cooling figure.
const CLOSED_FORM_FIG3: f64 = 0.0818;
/// Steady V at 10 mK with γ = 2π·5 kHz, N_max = 40, from the first full run.
const FROZEN_V_10MK: f64 = 0.2528745;
const TRAJECTORIES: usize = 2000;

struct Line {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn line(id: &'static str, pass: bool, detail: String) -> Line {
    Line { id, pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.5}")).collect::<Vec<_>>().join(", ")
}

fn with_method(mut cfg: ScenarioConfig, m: Method) -> ScenarioConfig {
    cfg.solver.method = m;
    cfg
}

struct Fig3 {
    master: ResultBundle,
    seconds: f64,
}

fn fig3() -> &'static Fig3 {
    static CELL: OnceLock<Fig3> = OnceLock::new();
    CELL.get_or_init(|| {
        let t = Instant::now();
        let master = run_scenario(&preset("fig3").unwrap()).unwrap();
        Fig3 { master, seconds: t.elapsed().as_secs_f64() }
    })
}

fn fig4() -> &'static ResultBundle {
    static CELL: OnceLock<ResultBundle> = OnceLock::new();
    CELL.get_or_init(|| run_scenario(&preset("fig4").unwrap()).unwrap())
}

fn criterion_1() -> Vec<Line> {
    let f = fig3();
    let s = f.master.series.as_ref().unwrap();
    let n = *s.mean_phonon.last().unwrap();
    let steady = f.master.manifest.steady.as_ref().unwrap().mean_phonon;
    let dev = rel(n, CLOSED_FORM_FIG3);
    vec![
        line("1a", dev <= 0.15, format!("final n̄ = {n:.5} (stationary {steady:.5}) vs closed form {CLOSED_FORM_FIG3}: deviation {:.1}% (≤ 15%)", dev * 100.0)),
        line("1b", (0.04..=0.10).contains(&n), format!("final n̄ = {n:.5} within reported band [0.04, 0.10]")),
        line("1c", f.seconds < 120.0, format!("fig3 master run took {:.1} s (< 120 s)", f.seconds)),
    ]
}

fn criterion_2() -> Vec<Line> {
    let f = fig3();
    let m = f.master.series.as_ref().unwrap();

    let mut cfg = with_method(preset("fig3").unwrap(), Method::Trajectory);
    cfg.solver.trajectories = TRAJECTORIES;
    cfg.solver.steady_state = false;
    let tr = run_scenario(&cfg).unwrap();
    let t = tr.series.as_ref().unwrap();
    let se = &t.std_errors.as_ref().unwrap().mean_phonon;
    let mut worst = 0.0_f64;
    let mut compared = 0;
    let mut outside = 0;
    for i in 0..m.len() {
        // Before the handoff both runs share the same oscillator-only prefix.
        if !se[i].is_finite() {
            continue;
        }
        compared += 1;
        let z = (t.mean_phonon[i] - m.mean_phonon[i]).abs() / se[i].max(f64::MIN_POSITIVE);
        worst = worst.max(z);
        outside += usize::from(z > 3.0);
    }
    let a = line(
        "2a",
        compared > 0 && outside == 0,
        format!("{TRAJECTORIES} trajectories vs master at {compared} samples: max |Δ|/SE = {worst:.2}, {outside} beyond 3 SE"),
    );

    let red = run_scenario(&with_method(preset("fig3").unwrap(), Method::Reduced)).unwrap();
    let r: &SeriesTable = red.series.as_ref().unwrap();
    let mut max_dev = 0.0_f64;
    for i in 0..m.len() {
        if m.t_dimless[i] >= 2.0 {
            max_dev = max_dev.max(rel(r.mean_phonon[i], m.mean_phonon[i]));
        }
    }
    let b = line(
        "2b",
        max_dev <= 0.10,
        format!(
            "reduced vs full n̄ for gt/2π ≥ 2: max deviation {:.1}% (≤ 10%); final {:.5} vs {:.5}",
            max_dev * 100.0,
            r.mean_phonon.last().unwrap(),
            m.mean_phonon.last().unwrap()
        ),
    );

    let rs = preset("fig3").unwrap().resolve().unwrap();
    let d = &rs.derived;
    let (g, gq) = (mhz(1.0), rs.qubit.relaxation);
    let formula = d.thermal_occupation * d.mech_damping / (2.0 * g * g / gq + d.mech_damping);
    let long = rate_equation(d.thermal_occupation, d.thermal_occupation, d.mech_damping, 2.0 * g * g / gq, &[1e-2]).unwrap()[0];
    let closed = steady_phonon_closed_form(d.thermal_occupation, d.mech_damping, g, gq).unwrap().exact;
    let err = rel(long, formula).max(rel(closed, formula));
    let c = line("2c", err <= 1e-12, format!("rate-equation fixed point {long:.15} vs closed form {formula:.15}: rel {err:.1e} (≤ 1e-12)"));
    vec![a, b, c]
}

fn criterion_3() -> Vec<Line> {
    let b = fig4();
    let n: Vec<f64> = b.summary.iter().map(|r| r.steady_phonon).collect();
    let eq: Vec<f64> = b.summary.iter().map(|r| r.eq11_prediction).collect();
    let worst = n.iter().zip(&eq).map(|(a, e)| rel(*a, *e)).fold(0.0, f64::max);
    vec![
        line("3a", n.len() == 8 && strictly_increasing(&n), format!("steady n̄ over Γ/2π = 1…10 MHz: [{}]", fmt(&n))),
        line("3b", worst <= 0.15, format!("pointwise vs closed form [{}]: max deviation {:.1}% (≤ 15%)", fmt(&eq), worst * 100.0)),
    ]
}

fn fig6_steady(damping_khz: Option<f64>) -> (QuantumState, f64) {
    let mut cfg = preset("fig6").unwrap();
    cfg.physical.mech_damping_khz = damping_khz;
    let r = cfg.resolve().unwrap();
    let model = cantisim_core::scenario::build_model(&cfg, &r, cfg.solver.fock_cutoff).unwrap();
    let zeta = match r.coupling {
        cantisim_core::scenario::Coupling::Squeezing(s) => s.zeta,
        _ => unreachable!(),
    };
    (steady_state(&model).unwrap(), zeta)
}

fn criterion_4() -> Vec<Line> {
    let target = (1.0 - 0.7) / (1.0 + 0.7);
    let (ideal, zeta) = fig6_steady(Some(0.0));
    let v0 = coherent_variance(&ideal);
    let fid = squeezed_vacuum_fidelity(&ideal, zeta);
    let (warm, _) = fig6_steady(None);
    let v = coherent_variance(&warm);
    vec![
        line("4a", rel(v0, target) <= 0.05, format!("γ = 0: V = {v0:.6} vs {target:.6} ({:.2}%, ≤ 5%)", rel(v0, target) * 100.0)),
        line("4b", fid > 0.99, format!("γ = 0: fidelity to S(ζ)|0⟩|g⟩ = {fid:.6} (> 0.99)")),
        line("4c", v < 0.35, format!("γ = 2π·5 kHz, 10 mK: V = {v:.6} (< 0.35)")),
        line("4d", rel(v, FROZEN_V_10MK) < 1e-5, format!("10 mK regression: V = {v:.7} vs frozen {FROZEN_V_10MK}")),
    ]
}

fn criterion_5() -> Vec<Line> {
    let b = run_scenario(&preset("fig7").unwrap()).unwrap();
    let v: Vec<f64> = b.summary.iter().map(|r| r.steady_variance).collect();
    vec![line("5", v.len() == 4 && strictly_increasing(&v), format!("V at T = 1, 10, 50, 100 mK: [{}]", fmt(&v)))]
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn criterion_6() -> Vec<Line> {
    // Bath on the bare oscillator, conjugated into the squeezed frame, against
    // the residual channels rebuilt from their rates.
    let (zeta, n_th, gamma) = (0.5_f64, 2.0, 1.0);
    let space = SpaceDescriptor::fock(60).unwrap();
    let b = fock_annihilation(space).into_matrix();
    let bd = b.adjoint();
    let s = squeeze_operator(zeta, space).into_matrix();
    let r = residual_dissipator_rates(zeta, n_th, gamma);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let rho = QuantumState::random_density(space, 4, &mut rng).to_density_matrix();
        let bath = dissipator_matrix(&bd, n_th * gamma, &rho) + dissipator_matrix(&b, (n_th + 1.0) * gamma, &rho);
        let lhs = s.adjoint() * bath * &s;
        let rt = s.adjoint() * &rho * &s;
        let rhs = dissipator_matrix(&bd, 2.0 * r.up, &rt)
            + dissipator_matrix(&b, 2.0 * r.down, &rt)
            + cross_dissipator_matrix(&bd, &b, C64::new(-2.0 * r.two_photon, 0.0), &rt);
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    let a = line("6a", worst <= 1e-6, format!("squeezed-frame bath on 20 random states (ζ = 0.5, N_max = 60): max error {worst:.2e} (≤ 1e-6)"));

    let rs = preset("fig3").unwrap().resolve().unwrap();
    let d = &rs.derived;
    let g = mhz(1.0);
    let mut gaps = Vec::new();
    let mut detail = Vec::new();
    for gq in [mhz(4.0), mhz(8.0), mhz(16.0)] {
        let full = cooling_model(SpaceDescriptor::qubit_fock(20).unwrap(), g, gq, d.mech_damping, d.thermal_occupation, d.omega, false).unwrap();
        let nf = mean_phonon(&steady_state(&full).unwrap());
        let rates = adiabatic_rates(g, gq, d.omega);
        let red = reduced_model(&rates, d.thermal_occupation, d.mech_damping, SpaceDescriptor::fock(20).unwrap()).unwrap();
        let nr = mean_phonon(&steady_state(&red).unwrap());
        gaps.push((nr - nf).abs());
        detail.push(format!("Γ/2π = {:.0} MHz: full {nf:.5}, reduced {nr:.5}", gq / mhz(1.0)));
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
    let b = line("6b", shrinking, format!("|reduced − full| = [{}] ({})", fmt(&gaps), detail.join("; ")));
    vec![a, b]
}

/// Short master run of a preset (end points only for sweeps) with the default
/// step and with half of it.
fn property_lines(name: &'static str, ids: [&'static str; 3]) -> Vec<Line> {
    let base = preset(name).unwrap();
    let points: Vec<ScenarioConfig> = match &base.sweep {
        Some(sw) => [sw.values[0], *sw.values.last().unwrap()].iter().map(|&v| base.with_parameter(sw.parameter, v)).collect(),
        None => vec![base.clone()],
    };
    let mut trace = 0.0_f64;
    let mut min_eig = f64::INFINITY;
    let mut halving = 0.0_f64;
    let mut steady_trace = 0.0_f64;
    let mut steady_min = f64::INFINITY;
    for mut cfg in points {
        cfg.solver.method = Method::Master;
        cfg.solver.steady_state = false;
        // Hot starts need the pre-cooling stretch (longest at large Γ) before
        // the full model runs at all.
        cfg.solver.t_final_dimless = if cfg.solver.handoff.is_some() { 5.0 } else { 1.0 };
        cfg.solver.n_samples = 21;
        let a = run_scenario(&cfg).unwrap();
        let diag = a.manifest.diagnostics.unwrap();
        trace = trace.max(diag.max_trace_error);
        min_eig = min_eig.min(diag.min_eigenvalue);
        let t0 = a.manifest.handoff.as_ref().map_or(0.0, |h| h.t_s);
        let t1 = cfg.resolve().unwrap().t_final_s;
        cfg.solver.dt_s = Some(0.5 * (t1 - t0) / diag.steps as f64);
        let b = run_scenario(&cfg).unwrap();
        let (sa, sb) = (a.series.unwrap(), b.series.unwrap());
        for (x, y) in [(&sa.mean_phonon, &sb.mean_phonon), (&sa.variance_v, &sb.variance_v), (&sa.excited_pop, &sb.excited_pop)] {
            let scale = y.iter().copied().filter(|v| v.is_finite()).fold(0.0, |m: f64, v| m.max(v.abs()));
            let diff = x.iter().zip(y).filter(|(p, q)| p.is_finite() && q.is_finite()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            if scale > 0.0 {
                halving = halving.max(diff / scale);
            }
        }
        let r = cfg.resolve().unwrap();
        let model = cantisim_core::scenario::build_model(&cfg, &r, cfg.solver.fock_cutoff).unwrap();
        let st = steady_state_report(&model).unwrap().state;
        steady_trace = steady_trace.max((st.trace() - 1.0).abs());
        steady_min = steady_min.min(st.min_eigenvalue());
    }
    vec![
        line(ids[0], trace <= 1e-6 && steady_trace <= 1e-6, format!("{name}: max |tr ρ − 1| = {trace:.1e} (series), {steady_trace:.1e} (stationary) (≤ 1e-6)")),
        line(ids[1], min_eig >= -1e-6 && steady_min >= -1e-6, format!("{name}: min eigenvalue {min_eig:.1e} (series), {steady_min:.1e} (stationary) (≥ −1e-6)")),
        line(ids[2], halving <= 1e-4, format!("{name}: dt-halving max relative change {halving:.1e} (≤ 1e-4)")),
    ]
}

/// Every number of a series as raw bits (NaN placeholders compare equal).
fn bits(s: &SeriesTable) -> Vec<u64> {
    let mut cols = vec![&s.t_abs_s, &s.t_dimless, &s.mean_phonon, &s.excited_pop, &s.variance_v];
    if let Some(e) = &s.std_errors {
        cols.extend([&e.mean_phonon, &e.excited_pop, &e.variance_v]);
    }
    cols.into_iter().flatten().map(|x| x.to_bits()).collect()
}

fn determinism_line(name: &'static str, id: &'static str) -> Line {
    let mut cfg = preset(name).unwrap();
    let sweep = cfg.sweep.take();
    if let Some(sw) = &sweep {
        cfg = cfg.with_parameter(sw.parameter, sw.values[0]);
    }
    cfg.solver.method = Method::Trajectory;
    cfg.solver.trajectories = 64;
    cfg.solver.steady_state = false;
    cfg.solver.t_final_dimless = if cfg.solver.handoff.is_some() { 2.0 } else { 0.5 };
    cfg.solver.n_samples = 11;
    let a = run_scenario(&cfg).unwrap().series.unwrap();
    let b = run_scenario(&cfg).unwrap().series.unwrap();
    let same = bits(&a) == bits(&b);
    cfg.solver.seed ^= 1;
    let c = run_scenario(&cfg).unwrap().series.unwrap();
    let differs = c.mean_phonon != a.mean_phonon;
    let mut sweep_same = true;
    if sweep.is_some() {
        let full = preset(name).unwrap();
        let x = run_scenario(&full).unwrap().summary;
        let y = run_scenario(&full).unwrap().summary;
        sweep_same = x.iter().zip(&y).all(|(p, q)| p.steady_phonon.to_bits() == q.steady_phonon.to_bits() && p.steady_variance.to_bits() == q.steady_variance.to_bits());
    }
    line(
        id,
        same && differs && sweep_same,
        format!("{name}: same seed bit-identical = {same}, other seed differs = {differs}, sweep repeat identical = {sweep_same}"),
    )
}

fn criterion_7() -> Vec<Line> {
    let mut out = Vec::new();
    for (name, ids, det) in [
        ("fig3", ["7-fig3-trace", "7-fig3-positivity", "7-fig3-dt"], "7-fig3-seed"),
        ("fig4", ["7-fig4-trace", "7-fig4-positivity", "7-fig4-dt"], "7-fig4-seed"),
        ("fig6", ["7-fig6-trace", "7-fig6-positivity", "7-fig6-dt"], "7-fig6-seed"),
        ("fig7", ["7-fig7-trace", "7-fig7-positivity", "7-fig7-dt"], "7-fig7-seed"),
    ] {
        out.extend(property_lines(name, ids));
        out.push(determinism_line(name, det));
    }
    out
}

fn main() {
    // `cargo test -- --list` style probes pass arguments; there is nothing to list.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [(&str, fn() -> Vec<Line>); 7] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
    ];
    let mut failed = 0;
    let mut total = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let lines = match catch_unwind(AssertUnwindSafe(f)) {
            Ok(l) => l,
            Err(e) => {
                let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
                vec![Line { id: name, pass: false, detail: format!("aborted: {}", msg.unwrap_or_default()) }]
            }
        };
        for l in &lines {
            total += 1;
            failed += usize::from(!l.pass);
            println!("{} criterion {:<18} {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail);
        }
        eprintln!("  (criterion {name}: {:.1} s)", t.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {total} checks passed", total - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
