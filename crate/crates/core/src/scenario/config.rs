//! Human-edited scenario description and its conversion to SI inputs.
//!
//! Frequencies are entered in MHz and multiplied by 2π, temperatures in K,
//! cantilever dimensions in µm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    derive_params, CantileverGeometry, DerivedParams, MechanicalSpec, QubitParams, TipCoupling,
};
use crate::reduced::SqueezeParams;
use crate::solver::Integrator;
use crate::units::{khz, mhz};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub physical: PhysicalBlock,
    pub drive: DriveBlock,
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub initial_state: InitialState,
    pub solver: SolverBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectations>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalBlock {
    pub mechanics: MechanicsBlock,
    pub qubit: QubitBlock,
    pub tip: TipBlock,
    pub temperature_k: f64,
    /// Replaces γ = ω/Q (e.g. 0 to switch the mechanical bath off).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mech_damping_khz: Option<f64>,
    /// A g₀ value quoted elsewhere, reported next to the computed one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quoted_bare_coupling_mhz: Option<f64>,
}

/// Exactly one of `geometry` and `omega_mhz`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanicsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_mhz: Option<f64>,
    pub quality_factor: f64,
    /// Required with `omega_mhz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_point_m: Option<f64>,
    #[serde(default = "one")]
    pub effective_mass_factor: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub length_um: f64,
    pub width_um: f64,
    pub thickness_um: f64,
    pub youngs_modulus_pa: f64,
    pub density_kg_m3: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitBlock {
    pub gap_mhz: f64,
    pub persistent_current_na: f64,
    pub relaxation_mhz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TipBlock {
    pub gradient_t_per_m: f64,
    pub effective_area_m2: f64,
}

/// Either the effective couplings directly or drive coefficients times g₀.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveBlock {
    Cooling {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coupling_mhz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
    },
    Squeezing {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta1_mhz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta2_mhz: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta_plus: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta_minus: Option<f64>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    /// Keep the counter-rotating sideband term of the cooling model.
    #[serde(default)]
    pub include_anti_jc: bool,
    /// Simulate the squeezing model in the S(ζ)-rotated frame.
    #[serde(default)]
    pub squeezed_frame: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    /// Qubit in |g⟩, oscillator thermal at `n_th` (default: the bath value).
    Thermal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_th: Option<f64>,
    },
    Vacuum,
    Fock { n: usize },
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Thermal { n_th: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Master,
    Trajectory,
    Reduced,
    Rate,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "master" => Ok(Method::Master),
            "trajectory" => Ok(Method::Trajectory),
            "reduced" => Ok(Method::Reduced),
            "rate" => Ok(Method::Rate),
            _ => Err(Error::config(format!("unknown solver '{s}' (master|trajectory|reduced|rate)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub method: Method,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub fock_cutoff: usize,
    /// End time in units of 2π/g (cooling) or 2π/Θ₁ (squeezing).
    pub t_final_dimless: f64,
    pub n_samples: usize,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
    #[serde(default)]
    pub seed: u64,
    /// Pre-cool a hot thermal start with the reduced model until it fits the cutoff.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub handoff: Option<HandoffBlock>,
    /// Also solve for the stationary state and report it in the summary.
    #[serde(default = "yes")]
    pub steady_state: bool,
}

fn default_tolerance() -> f64 {
    1e-8
}

fn default_trajectories() -> usize {
    500
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HandoffBlock {
    /// Cutoff of the oscillator-only pre-cooling run.
    pub fock_cutoff: usize,
    /// Hand over once the weight above the working cutoff is below this.
    pub tail_tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    RelaxationMhz,
    TemperatureK,
    CouplingMhz,
    Theta1Mhz,
    Theta2Mhz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    /// Flag points whose counter-rotating heating is not negligible.
    #[serde(default)]
    pub regime_guard: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self { directory: None, formats: default_formats() }
    }
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

/// Bands the run is checked against; results land in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_phonon_band: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_excited_pop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_final_variance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coupling {
    Cooling { g: f64 },
    Squeezing(SqueezeParams),
}

impl Coupling {
    /// Rate that sets the dimensionless time axis (g or Θ₁).
    pub fn time_unit_rate(&self) -> f64 {
        match self {
            Coupling::Cooling { g } => *g,
            Coupling::Squeezing(s) => s.theta1,
        }
    }
}

/// A config converted to SI/angular units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub mechanics: MechanicalSpec,
    pub qubit: QubitParams,
    pub tip: TipCoupling,
    pub derived: DerivedParams,
    pub coupling: Coupling,
    pub t_final_s: f64,
    pub sample_times_s: Vec<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::config(format!("parse: {e}")))?;
        Self::from_value(value)
    }

    /// Accepts a config, or a manifest whose `config` key holds one.
    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let value = match value {
            serde_json::Value::Object(mut m) if m.contains_key("manifest_version") => {
                m.remove("config").ok_or_else(|| Error::config("manifest has no 'config' entry"))?
            }
            v => v,
        };
        let cfg: ScenarioConfig = serde_json::from_value(value).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serialises")
    }

    /// Structural checks that do not need the derived parameters.
    pub fn validate(&self) -> Result<()> {
        let m = &self.physical.mechanics;
        match (&m.geometry, m.omega_mhz) {
            (Some(_), Some(_)) => return Err(Error::config("give either mechanics.geometry or mechanics.omega_mhz, not both")),
            (None, None) => return Err(Error::config("mechanics needs geometry or omega_mhz")),
            (None, Some(_)) if m.zero_point_m.is_none() => {
                return Err(Error::config("mechanics.omega_mhz needs zero_point_m (no mass to derive it from)"))
            }
            _ => {}
        }
        match &self.drive {
            DriveBlock::Cooling { coupling_mhz, eta } => {
                if coupling_mhz.is_some() == eta.is_some() {
                    return Err(Error::config("cooling drive needs exactly one of coupling_mhz and eta"));
                }
            }
            DriveBlock::Squeezing { theta1_mhz, theta2_mhz, eta_plus, eta_minus } => {
                let direct = theta1_mhz.is_some() && theta2_mhz.is_some();
                let via_eta = eta_plus.is_some() && eta_minus.is_some();
                let any_direct = theta1_mhz.is_some() || theta2_mhz.is_some();
                let any_eta = eta_plus.is_some() || eta_minus.is_some();
                if !(direct && !any_eta || via_eta && !any_direct) {
                    return Err(Error::config("squeezing drive needs theta1_mhz+theta2_mhz or eta_plus+eta_minus"));
                }
                if self.model.include_anti_jc {
                    return Err(Error::config("include_anti_jc applies to the cooling drive only"));
                }
            }
        }
        if matches!(self.drive, DriveBlock::Cooling { .. }) && self.model.squeezed_frame {
            return Err(Error::config("squeezed_frame applies to the squeezing drive only"));
        }
        let s = &self.solver;
        if s.fock_cutoff < 1 {
            return Err(Error::config("solver.fock_cutoff must be ≥ 1"));
        }
        if !(s.t_final_dimless.is_finite() && s.t_final_dimless > 0.0) {
            return Err(Error::config("solver.t_final_dimless must be positive"));
        }
        if s.n_samples < 2 {
            return Err(Error::config("solver.n_samples must be ≥ 2"));
        }
        if s.trajectories == 0 {
            return Err(Error::config("solver.trajectories must be ≥ 1"));
        }
        if let Some(h) = &s.handoff {
            if h.fock_cutoff <= s.fock_cutoff || !(h.tail_tolerance > 0.0 && h.tail_tolerance < 1.0) {
                return Err(Error::config("handoff needs fock_cutoff above the working cutoff and 0 < tail_tolerance < 1"));
            }
            if !matches!(self.drive, DriveBlock::Cooling { .. }) {
                return Err(Error::config("handoff pre-cooling needs the cooling drive"));
            }
        }
        if matches!(self.initial_state, InitialState::Fock { n } if n > s.fock_cutoff) {
            return Err(Error::config("initial Fock level above the cutoff"));
        }
        if let Some(sw) = &self.sweep {
            if sw.values.is_empty() {
                return Err(Error::config("sweep.values is empty"));
            }
            if sw.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::config("sweep.values must be finite"));
            }
            let ok = match (sw.parameter, &self.drive) {
                (SweepParameter::CouplingMhz, DriveBlock::Cooling { coupling_mhz, .. }) => coupling_mhz.is_some(),
                (SweepParameter::CouplingMhz, _) => false,
                (SweepParameter::Theta1Mhz | SweepParameter::Theta2Mhz, DriveBlock::Squeezing { theta1_mhz, .. }) => {
                    theta1_mhz.is_some()
                }
                (SweepParameter::Theta1Mhz | SweepParameter::Theta2Mhz, _) => false,
                _ => true,
            };
            if !ok {
                return Err(Error::config(format!("sweep parameter {:?} does not exist in this drive block", sw.parameter)));
            }
        }
        Ok(())
    }

    /// Copy with one sweep parameter replaced.
    pub fn with_parameter(&self, p: SweepParameter, value: f64) -> Self {
        let mut c = self.clone();
        match p {
            SweepParameter::RelaxationMhz => c.physical.qubit.relaxation_mhz = value,
            SweepParameter::TemperatureK => c.physical.temperature_k = value,
            SweepParameter::CouplingMhz => {
                if let DriveBlock::Cooling { coupling_mhz, .. } = &mut c.drive {
                    *coupling_mhz = Some(value);
                }
            }
            SweepParameter::Theta1Mhz => {
                if let DriveBlock::Squeezing { theta1_mhz, .. } = &mut c.drive {
                    *theta1_mhz = Some(value);
                }
            }
            SweepParameter::Theta2Mhz => {
                if let DriveBlock::Squeezing { theta2_mhz, .. } = &mut c.drive {
                    *theta2_mhz = Some(value);
                }
            }
        }
        c.sweep = None;
        c
    }

    pub fn resolve(&self) -> Result<Resolved> {
        self.validate()?;
        let p = &self.physical;
        let m = &p.mechanics;
        let mechanics = match (&m.geometry, m.omega_mhz) {
            (Some(g), None) => MechanicalSpec::Geometry(CantileverGeometry {
                length: g.length_um * 1e-6,
                width: g.width_um * 1e-6,
                thickness: g.thickness_um * 1e-6,
                youngs_modulus: g.youngs_modulus_pa,
                density: g.density_kg_m3,
                quality_factor: m.quality_factor,
                effective_mass_factor: m.effective_mass_factor,
            }),
            (None, Some(w)) => MechanicalSpec::Direct {
                omega: mhz(w),
                quality_factor: m.quality_factor,
                zero_point: m.zero_point_m.expect("validated"),
            },
            _ => unreachable!("validated"),
        };
        let qubit = QubitParams {
            gap: mhz(p.qubit.gap_mhz),
            persistent_current: p.qubit.persistent_current_na * 1e-9,
            relaxation: mhz(p.qubit.relaxation_mhz),
        };
        let tip = TipCoupling { gradient: p.tip.gradient_t_per_m, effective_area: p.tip.effective_area_m2 };
        let mut derived = derive_params(&mechanics, &qubit, &tip, p.temperature_k).map_err(as_config)?;
        if let Some(k) = p.mech_damping_khz {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::config("mech_damping_khz must be ≥ 0"));
            }
            derived = derived.with_mech_damping(khz(k));
        }
        let coupling = match &self.drive {
            DriveBlock::Cooling { coupling_mhz, eta } => {
                let g = match (coupling_mhz, eta) {
                    (Some(g), None) => mhz(*g),
                    (None, Some(e)) => e * derived.bare_coupling,
                    _ => unreachable!("validated"),
                };
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::config("cooling coupling must be ≥ 0"));
                }
                derived = derived.with_sideband_coupling(g);
                Coupling::Cooling { g }
            }
            DriveBlock::Squeezing { theta1_mhz, theta2_mhz, eta_plus, eta_minus } => {
                let (t1, t2) = match (theta1_mhz, theta2_mhz, eta_plus, eta_minus) {
                    (Some(a), Some(b), None, None) => (mhz(*a), mhz(*b)),
                    (None, None, Some(ep), Some(em)) => (em * derived.bare_coupling, ep * derived.bare_coupling),
                    _ => unreachable!("validated"),
                };
                Coupling::Squeezing(SqueezeParams::new(t1, t2).map_err(as_config)?)
            }
        };
        let rate = coupling.time_unit_rate();
        if !(rate > 0.0) {
            return Err(Error::config("time axis needs a non-zero coupling"));
        }
        let t_final_s = self.solver.t_final_dimless * std::f64::consts::TAU / rate;
        let k = self.solver.n_samples;
        let sample_times_s = (0..k).map(|i| t_final_s * i as f64 / (k - 1) as f64).collect();
        Ok(Resolved { mechanics, qubit, tip, derived, coupling, t_final_s, sample_times_s })
    }
}

pub(crate) fn as_config(e: Error) -> Error {
    match e {
        Error::InvalidParameter(m) => Error::Config(m),
        other => other,
    }
}

/// RFC 7386 merge-patch: objects merge recursively, `null` deletes, anything
/// else replaces.
pub fn merge_patch(target: &mut serde_json::Value, patch: &serde_json::Value) {
    use serde_json::Value;
    match patch {
        Value::Object(p) => {
            if !target.is_object() {
                *target = Value::Object(Default::default());
            }
            let t = target.as_object_mut().expect("object");
            for (k, v) in p {
                if v.is_null() {
                    t.remove(k);
                } else {
                    merge_patch(t.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
        }
        other => *target = other.clone(),
    }
}
