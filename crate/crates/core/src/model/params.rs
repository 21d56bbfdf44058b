//! Physical inputs and the derived rate chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{bose_occupation, HBAR};

/// Prefactor of the fundamental flexural mode of a clamped-free beam.
const MODE_PREFACTOR: f64 = 3.516;

/// Coefficients above this leave the first-order sideband expansion.
pub const DRIVE_COEFFICIENT_LIMIT: f64 = 0.3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantileverGeometry {
    /// m
    pub length: f64,
    /// m
    pub width: f64,
    /// m
    pub thickness: f64,
    /// Pa
    pub youngs_modulus: f64,
    /// kg/m³
    pub density: f64,
    pub quality_factor: f64,
    /// Multiplies the geometric mass ρ·l·w·t.
    #[serde(default = "one")]
    pub effective_mass_factor: f64,
}

fn one() -> f64 {
    1.0
}

impl CantileverGeometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("youngs_modulus", self.youngs_modulus),
            ("density", self.density),
            ("quality_factor", self.quality_factor),
            ("effective_mass_factor", self.effective_mass_factor),
        ];
        for (name, v) in fields {
            positive(name, v)?;
        }
        if self.length < 5.0 * self.width || self.width < self.thickness {
            log::warn!(
                "cantilever aspect ratio l={:e}, w={:e}, t={:e} is outside the thin-beam regime",
                self.length,
                self.width,
                self.thickness
            );
        }
        Ok(())
    }

    /// ω = 3.516 (t/l²) √(E / 12ρ), in rad/s.
    pub fn fundamental_frequency(&self) -> f64 {
        MODE_PREFACTOR * self.thickness / (self.length * self.length)
            * (self.youngs_modulus / (12.0 * self.density)).sqrt()
    }

    pub fn mass(&self) -> f64 {
        self.effective_mass_factor * self.density * self.length * self.width * self.thickness
    }
}

/// Either a beam to derive ω and m from, or ω given directly.
///
/// With a direct ω there is no mass, so the zero-point amplitude has to be
/// supplied; the mass is then back-computed from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanicalSpec {
    Geometry(CantileverGeometry),
    Direct {
        /// rad/s
        omega: f64,
        quality_factor: f64,
        /// m
        zero_point: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    /// rad/s
    pub gap: f64,
    /// A
    pub persistent_current: f64,
    /// rad/s
    pub relaxation: f64,
}

impl QubitParams {
    pub fn validate(&self) -> Result<()> {
        positive("qubit gap", self.gap)?;
        positive("qubit relaxation", self.relaxation)?;
        non_negative("persistent current", self.persistent_current)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipCoupling {
    /// T/m
    pub gradient: f64,
    /// m²
    pub effective_area: f64,
}

impl TipCoupling {
    pub fn validate(&self) -> Result<()> {
        positive("field gradient", self.gradient)?;
        positive("effective area", self.effective_area)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingDrive {
    pub eta: f64,
    /// rad/s
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingDrive {
    /// Blue sideband coefficient, multiplies b†.
    pub eta_plus: f64,
    /// Red sideband coefficient, multiplies b.
    pub eta_minus: f64,
    /// rad/s
    pub freq_plus: f64,
    /// rad/s
    pub freq_minus: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling: Option<CoolingDrive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezing: Option<SqueezingDrive>,
}

impl DriveParams {
    pub fn validate(&self) -> Result<()> {
        let mut coeffs = Vec::new();
        if let Some(c) = &self.cooling {
            positive("cooling drive frequency", c.frequency)?;
            coeffs.push(("eta", c.eta));
        }
        if let Some(s) = &self.squeezing {
            positive("blue drive frequency", s.freq_plus)?;
            positive("red drive frequency", s.freq_minus)?;
            coeffs.push(("eta_plus", s.eta_plus));
            coeffs.push(("eta_minus", s.eta_minus));
        }
        for (name, eta) in coeffs {
            positive(name, eta)?;
            if eta > DRIVE_COEFFICIENT_LIMIT {
                log::warn!("drive coefficient {name} = {eta} exceeds {DRIVE_COEFFICIENT_LIMIT}; sideband couplings become inaccurate");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// Mechanical frequency, rad/s.
    pub omega: f64,
    pub mass: f64,
    pub zero_point: f64,
    /// g₀ = I_p S_eff G_m a₀ / ħ, rad/s.
    pub bare_coupling: f64,
    /// Effective JC coupling g (η·g₀ for a cooling drive), rad/s.
    pub sideband_coupling: f64,
    /// γ = ω/Q, rad/s.
    pub mech_damping: f64,
    pub thermal_occupation: f64,
    /// Bose occupation of the qubit bath. Reported only; the models keep the
    /// qubit bath at zero temperature.
    pub qubit_occupation: f64,
    pub temperature: f64,
    pub qubit_gap: f64,
    pub quality_factor: f64,
}

pub fn derive_params(
    mech: &MechanicalSpec,
    qubit: &QubitParams,
    tip: &TipCoupling,
    temperature: f64,
) -> Result<DerivedParams> {
    qubit.validate()?;
    tip.validate()?;
    non_negative("temperature", temperature)?;
    let (omega, mass, zero_point, quality_factor) = match mech {
        MechanicalSpec::Geometry(g) => {
            g.validate()?;
            let omega = g.fundamental_frequency();
            let mass = g.mass();
            (omega, mass, (HBAR / (2.0 * mass * omega)).sqrt(), g.quality_factor)
        }
        MechanicalSpec::Direct { omega, quality_factor, zero_point } => {
            positive("omega", *omega)?;
            positive("quality_factor", *quality_factor)?;
            positive("zero_point", *zero_point)?;
            let mass = HBAR / (2.0 * omega * zero_point * zero_point);
            (*omega, mass, *zero_point, *quality_factor)
        }
    };
    Ok(DerivedParams {
        omega,
        mass,
        zero_point,
        bare_coupling: bare_coupling(qubit.persistent_current, tip.effective_area, tip.gradient, zero_point),
        sideband_coupling: 0.0,
        mech_damping: omega / quality_factor,
        thermal_occupation: bose_occupation(omega, temperature),
        qubit_occupation: bose_occupation(qubit.gap, temperature),
        temperature,
        qubit_gap: qubit.gap,
        quality_factor,
    })
}

/// g₀ in rad/s. Linear in each factor.
pub fn bare_coupling(persistent_current: f64, effective_area: f64, gradient: f64, zero_point: f64) -> f64 {
    persistent_current * effective_area * gradient * zero_point / HBAR
}

impl DerivedParams {
    pub fn with_cooling_drive(mut self, drive: &CoolingDrive) -> Self {
        self.sideband_coupling = drive.eta * self.bare_coupling;
        self
    }

    pub fn with_sideband_coupling(mut self, g: f64) -> Self {
        self.sideband_coupling = g;
        self
    }

    /// Replaces γ = ω/Q, e.g. to switch the mechanical bath off.
    pub fn with_mech_damping(mut self, gamma: f64) -> Self {
        self.mech_damping = gamma;
        self
    }

    /// (Θ₁, Θ₂) = (η⁻g₀, η⁺g₀) for a two-tone drive.
    pub fn squeeze_couplings(&self, drive: &SqueezingDrive) -> (f64, f64) {
        (drive.eta_minus * self.bare_coupling, drive.eta_plus * self.bare_coupling)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be non-negative and finite, got {v}")))
    }
}
