//! Assembly of the cooling, squeezing and lab-frame models.

use crate::error::{Error, Result};
use crate::quantum::{
    fock_annihilation, number_operator, qubit_operator, Operator, QubitOp, SpaceDescriptor, C64,
};
use crate::reduced::{residual_dissipator_rates, SqueezeParams};

use super::lindblad::{Dissipator, Frame, LindbladModel, ModelParams};
use super::params::{DerivedParams, DriveParams, QubitParams};

struct Ops {
    b: Operator,
    bd: Operator,
    sp: Operator,
    sm: Operator,
}

impl Ops {
    fn new(space: SpaceDescriptor) -> Result<Self> {
        if !space.has_qubit() || !space.has_fock() {
            return Err(Error::invalid(format!("qubit ⊗ oscillator space required, got {space}")));
        }
        let b = fock_annihilation(space);
        let sp = qubit_operator(QubitOp::Raise, space)?;
        Ok(Self { bd: b.adjoint(), sm: sp.adjoint(), b, sp })
    }
}

fn check_rates(gamma_q: f64, gamma_m: f64, n_th: f64) -> Result<()> {
    for (name, v) in [("qubit decay", gamma_q), ("mechanical damping", gamma_m), ("thermal occupation", n_th)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("{name} must be finite and ≥ 0, got {v}")));
        }
    }
    Ok(())
}

fn with_baths(model: LindbladModel, ops: &Ops, gamma_q: f64, gamma_m: f64, n_th: f64) -> Result<LindbladModel> {
    model
        .with_collapse(ops.sm.clone(), gamma_q)?
        .with_collapse(ops.bd.clone(), n_th * gamma_m)?
        .with_collapse(ops.b.clone(), (n_th + 1.0) * gamma_m)
}

/// Sideband-cooling model in the frame rotating with the drive.
///
/// `H = g(σ₊b + σ₋b†)`, optionally plus the counter-rotating
/// `g(σ₊b† e^{2iωt} + H.c.)`, with qubit decay and a thermal bath on the
/// oscillator.
pub fn cooling_model(
    space: SpaceDescriptor,
    g: f64,
    gamma_q: f64,
    gamma_m: f64,
    n_th: f64,
    omega: f64,
    include_anti_jc: bool,
) -> Result<LindbladModel> {
    check_rates(gamma_q, gamma_m, n_th)?;
    let ops = Ops::new(space)?;
    let jc = &ops.sp * &ops.b;
    let h = (&jc + &jc.adjoint()).scale_real(g);
    let params = ModelParams {
        coupling: g,
        qubit_decay: gamma_q,
        mech_damping: gamma_m,
        thermal_occupation: n_th,
        ..Default::default()
    };
    let frame = if include_anti_jc { Frame::RotatingFull } else { Frame::RotatingJc };
    let mut model = LindbladModel::new(space, frame, h, params)?;
    if include_anti_jc {
        model = model.with_drive(&ops.sp * &ops.bd, C64::new(g, 0.0), 2.0 * omega)?;
    }
    with_baths(model, &ops, gamma_q, gamma_m, n_th)
}

pub fn build_cooling_model(
    p: &DerivedParams,
    gamma_q: f64,
    include_anti_jc: bool,
    space: SpaceDescriptor,
) -> Result<LindbladModel> {
    cooling_model(space, p.sideband_coupling, gamma_q, p.mech_damping, p.thermal_occupation, p.omega, include_anti_jc)
}

/// Two-tone model `H = σ₊(Θ₁b + Θ₂b†) + H.c.` with the same baths as cooling.
pub fn build_squeezing_model(
    space: SpaceDescriptor,
    theta1: f64,
    theta2: f64,
    gamma_q: f64,
    gamma_m: f64,
    n_th: f64,
) -> Result<LindbladModel> {
    // Validates Θ₁ > Θ₂ ≥ 0.
    SqueezeParams::new(theta1, theta2)?;
    check_rates(gamma_q, gamma_m, n_th)?;
    let ops = Ops::new(space)?;
    let x = &(&ops.sp * &ops.b.scale_real(theta1)) + &(&ops.sp * &ops.bd.scale_real(theta2));
    let h = &x + &x.adjoint();
    let params = ModelParams {
        coupling: theta1,
        counter_coupling: theta2,
        qubit_decay: gamma_q,
        mech_damping: gamma_m,
        thermal_occupation: n_th,
        zeta: 0.0,
    };
    let model = LindbladModel::new(space, Frame::EffectiveSqueeze, h, params)?;
    with_baths(model, &ops, gamma_q, gamma_m, n_th)
}

/// Undriven-frame Hamiltonian
/// `½νσ_z + ωb†b + g₀(σ₊+σ₋)(b†+b) − Σ ηᵢωᵢcos(ωᵢt)σ_z`
/// with the usual baths. Only practical at scaled-down frequencies.
pub fn build_lab_frame_model(
    p: &DerivedParams,
    qubit: &QubitParams,
    drives: &DriveParams,
    space: SpaceDescriptor,
) -> Result<LindbladModel> {
    drives.validate()?;
    let ops = Ops::new(space)?;
    let sz = qubit_operator(QubitOp::Z, space)?;
    let n = number_operator(space);
    let sx = &ops.sp + &ops.sm;
    let x = &ops.b + &ops.bd;
    let h = &(&sz.scale_real(0.5 * qubit.gap) + &n.scale_real(p.omega)) + &(&sx * &x).scale_real(p.bare_coupling);
    let params = ModelParams {
        coupling: p.bare_coupling,
        qubit_decay: qubit.relaxation,
        mech_damping: p.mech_damping,
        thermal_occupation: p.thermal_occupation,
        ..Default::default()
    };
    let mut model = LindbladModel::new(space, Frame::Lab, h, params)?;
    let mut tones = Vec::new();
    if let Some(c) = &drives.cooling {
        tones.push((c.eta, c.frequency));
    }
    if let Some(s) = &drives.squeezing {
        tones.push((s.eta_plus, s.freq_plus));
        tones.push((s.eta_minus, s.freq_minus));
    }
    for (eta, w) in tones {
        // −ηω cos(ωt) σ_z = c σ_z e^{iωt} + H.c. with c = −ηω/2.
        model = model.with_drive(sz.clone(), C64::new(-0.5 * eta * w, 0.0), w)?;
    }
    with_baths(model, &ops, qubit.relaxation, p.mech_damping, p.thermal_occupation)
}

/// Rewrites an effective-squeeze model for `ρ̃ = S†(ζ) ρ S(ζ)`.
///
/// The coupling becomes `σ₊[(Θ₁coshζ − Θ₂sinhζ) b + (Θ₂coshζ − Θ₁sinhζ) b†] + H.c.`,
/// which is `Θ(bσ₊ + b†σ₋)` at ζ = atanh(Θ₂/Θ₁). The oscillator bath turns into
/// enhanced b†/b channels plus an explicit two-photon block.
pub fn squeezed_frame_transform(model: &LindbladModel, zeta: f64) -> Result<LindbladModel> {
    if model.frame != Frame::EffectiveSqueeze {
        return Err(Error::invalid(format!(
            "squeezed-frame transform needs an effective-squeeze model, got {:?}",
            model.frame
        )));
    }
    if !zeta.is_finite() || zeta < 0.0 {
        return Err(Error::invalid(format!("squeeze parameter must be finite and ≥ 0, got {zeta}")));
    }
    if zeta == 0.0 {
        return Ok(model.clone());
    }
    let space = model.space;
    let ops = Ops::new(space)?;
    let p = model.params;
    let (c, s) = (zeta.cosh(), zeta.sinh());
    let on_b = p.coupling * c - p.counter_coupling * s;
    let on_bd = p.counter_coupling * c - p.coupling * s;
    let x = &(&ops.sp * &ops.b.scale_real(on_b)) + &(&ops.sp * &ops.bd.scale_real(on_bd));
    let h = &x + &x.adjoint();
    let params = ModelParams { zeta, coupling: on_b, counter_coupling: on_bd, ..p };
    let mut out = LindbladModel::new(space, Frame::SqueezedFrame, h, params)?;

    // Qubit channels are untouched; the oscillator bath is replaced wholesale.
    for d in &model.dissipators {
        if let Dissipator::Collapse { op, rate } = d {
            if op.max_abs_diff(&ops.sm) == 0.0 {
                out = out.with_collapse(op.clone(), *rate)?;
            }
        }
    }
    let r = residual_dissipator_rates(zeta, p.thermal_occupation, p.mech_damping);
    // The residual rates multiply the bracket 2AρA† − {A†A, ρ}, i.e. half a
    // population rate.
    out.with_collapse(ops.bd.clone(), 2.0 * r.up)?
        .with_collapse(ops.b.clone(), 2.0 * r.down)?
        .with_cross(ops.bd, ops.b, C64::new(-2.0 * r.two_photon, 0.0))
}
