//! Regime checks for the approximations behind the effective models.

use serde::{Deserialize, Serialize};

use crate::reduced::{adiabatic_rates, residual_dissipator_rates, SqueezeParams};

use super::params::DerivedParams;

pub const PASS_RATIO: f64 = 10.0;
pub const MARGINAL_RATIO: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
}

impl Verdict {
    pub fn from_ratio(ratio: f64) -> Self {
        if ratio >= PASS_RATIO {
            Verdict::Pass
        } else if ratio >= MARGINAL_RATIO {
            Verdict::Marginal
        } else {
            Verdict::Fail
        }
    }
}

/// One inequality `large ≫ small`, ratio = large / small.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityCheck {
    pub name: String,
    pub condition: String,
    pub large: f64,
    pub small: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

impl ValidityCheck {
    fn new(name: &str, condition: &str, large: f64, small: f64) -> Self {
        let ratio = if small == 0.0 { f64::INFINITY } else { large / small };
        Self {
            name: name.to_string(),
            condition: condition.to_string(),
            large,
            small,
            ratio,
            verdict: Verdict::from_ratio(ratio),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    pub fn min_ratio(&self) -> f64 {
        self.checks.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn worst(&self) -> Verdict {
        self.checks.iter().map(|c| c.verdict).fold(Verdict::Pass, |a, v| match (a, v) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Marginal, _) | (_, Verdict::Marginal) => Verdict::Marginal,
            _ => Verdict::Pass,
        })
    }

    pub fn has_failure(&self) -> bool {
        self.worst() == Verdict::Fail
    }

    pub fn get(&self, name: &str) -> Option<&ValidityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One `# name: condition ratio=… verdict` line per check, for CSV headers.
    pub fn comment_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "# validity {}: {} large={:.6e} small={:.6e} ratio={:.4} {:?}",
                    c.name, c.condition, c.large, c.small, c.ratio, c.verdict
                )
            })
            .collect()
    }
}

/// Evaluates each regime inequality with both sides in rad/s.
///
/// Without `squeeze` the cooling conditions are checked (RWA, adiabatic
/// elimination, negligible counter-rotating heating); with it the squeezing
/// conditions on residual dissipation and on eliminating the qubit.
pub fn check_validity(p: &DerivedParams, gamma_q: f64, squeeze: Option<&SqueezeParams>) -> ValidityReport {
    let mut checks = vec![ValidityCheck::new(
        "rwa",
        "min(nu, omega) >> g0",
        p.qubit_gap.min(p.omega),
        p.bare_coupling,
    )];
    match squeeze {
        None => {
            let g = p.sideband_coupling;
            checks.push(ValidityCheck::new(
                "adiabatic_elimination",
                "Gamma >> 2g^2/Gamma",
                gamma_q,
                2.0 * g * g / gamma_q,
            ));
            let heating = adiabatic_rates(g, gamma_q, p.omega).heating_rate();
            checks.push(ValidityCheck::new(
                "counter_rotating_heating",
                "n_th*gamma >> Re(A+)",
                p.thermal_occupation * p.mech_damping,
                heating,
            ));
        }
        Some(sq) => {
            let r = residual_dissipator_rates(sq.zeta, p.thermal_occupation, p.mech_damping);
            checks.push(ValidityCheck::new(
                "residual_dissipation",
                "Theta >> max(up, two_photon)",
                sq.theta,
                r.up.max(r.two_photon),
            ));
            checks.push(ValidityCheck::new(
                "squeeze_adiabatic",
                "Gamma >> 2Theta^2/Gamma",
                gamma_q,
                2.0 * sq.theta * sq.theta / gamma_q,
            ));
        }
    }
    ValidityReport { checks }
}
