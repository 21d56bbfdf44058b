use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::C64;

/// Two-tone drive amplitudes and the squeeze they target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub theta1: f64,
    pub theta2: f64,
    /// atanh(Θ₂/Θ₁)
    pub zeta: f64,
    /// √(Θ₁² − Θ₂²)
    pub theta: f64,
}

impl SqueezeParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(theta1.is_finite() && theta2.is_finite() && theta2 >= 0.0 && theta1 > theta2) {
            return Err(Error::invalid(format!(
                "squeezing needs Θ₁ > Θ₂ ≥ 0, got Θ₁ = {theta1}, Θ₂ = {theta2}"
            )));
        }
        Ok(Self {
            theta1,
            theta2,
            zeta: (theta2 / theta1).atanh(),
            theta: ((theta1 - theta2) * (theta1 + theta2)).sqrt(),
        })
    }

    /// Quadrature variance of the target squeezed vacuum, e^{−2ζ}.
    pub fn target_variance(&self) -> f64 {
        (-2.0 * self.zeta).exp()
    }
}

/// Rates of the oscillator-only equation left after eliminating the qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticRates {
    /// 2g²/Γ
    pub a_minus: f64,
    /// 2g²/(Γ + 2iω)
    pub a_plus: C64,
}

impl AdiabaticRates {
    /// Re(A₊) = 2g²Γ/(Γ² + 4ω²).
    pub fn heating_rate(&self) -> f64 {
        self.a_plus.re
    }
}

pub fn adiabatic_rates(g: f64, gamma_q: f64, omega: f64) -> AdiabaticRates {
    let two_g2 = 2.0 * g * g;
    AdiabaticRates {
        a_minus: two_g2 / gamma_q,
        a_plus: C64::new(two_g2, 0.0) / C64::new(gamma_q, 2.0 * omega),
    }
}

/// Oscillator-bath channels seen from the squeezed frame, as coefficients of
/// the bracket `2AρA† − {A†A, ρ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRates {
    pub up: f64,
    pub down: f64,
    /// Weight of the `b†ρb† + bρb` two-photon bracket (enters with a minus sign).
    pub two_photon: f64,
}

pub fn residual_dissipator_rates(zeta: f64, n_th: f64, gamma_m: f64) -> ResidualRates {
    let s2 = zeta.sinh().powi(2);
    let half = 0.5 * gamma_m;
    let spread = half * (2.0 * n_th + 1.0);
    ResidualRates {
        up: n_th * half + spread * s2,
        down: (n_th + 1.0) * half + spread * s2,
        two_photon: spread * zeta.cosh() * zeta.sinh(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormPhonon {
    /// n_thγ / (2g²/Γ + γ)
    pub exact: f64,
    /// n_thγΓ / 2g², valid once the cooling rate dominates γ.
    pub approx: f64,
}

pub fn steady_phonon_closed_form(n_th: f64, gamma_m: f64, g: f64, gamma_q: f64) -> Result<ClosedFormPhonon> {
    let cool = 2.0 * g * g / gamma_q;
    if !(cool + gamma_m > 0.0) {
        return Err(Error::invalid("cooling rate plus mechanical damping must be positive"));
    }
    Ok(ClosedFormPhonon {
        exact: rate_equation_fixed_point(n_th, gamma_m, cool),
        approx: if cool > 0.0 { n_th * gamma_m / cool } else { f64::INFINITY },
    })
}

pub fn rate_equation_fixed_point(n_th: f64, gamma_m: f64, cool_rate: f64) -> f64 {
    n_th * gamma_m / (cool_rate + gamma_m)
}

/// Solution of `dn̄/dt = (n̄+1)n_thγ − n̄[cool + (n_th+1)γ]` at `times`.
///
/// The equation is linear with relaxation rate `cool + γ`, so no stepping is
/// involved.
pub fn rate_equation(n0: f64, n_th: f64, gamma_m: f64, cool_rate: f64, times: &[f64]) -> Result<Vec<f64>> {
    if [n0, n_th, gamma_m, cool_rate].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("rate equation inputs must be finite and ≥ 0"));
    }
    let rate = cool_rate + gamma_m;
    if rate == 0.0 {
        return Ok(vec![n0; times.len()]);
    }
    let fixed = rate_equation_fixed_point(n_th, gamma_m, cool_rate);
    Ok(times.iter().map(|&t| fixed + (n0 - fixed) * (-rate * t).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{khz, mhz};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn cooling_rate_for_reference_point() {
        let r = adiabatic_rates(mhz(1.0), mhz(4.0), mhz(50.0));
        assert_relative_eq!(r.a_minus, mhz(0.5), max_relative = 1e-14);
        assert_relative_eq!(r.heating_rate(), 2.0 * mhz(1.0).powi(2) * mhz(4.0) / (mhz(4.0).powi(2) + 4.0 * mhz(50.0).powi(2)), max_relative = 1e-13);
        let static_limit = adiabatic_rates(mhz(1.0), mhz(4.0), 0.0);
        assert_relative_eq!(static_limit.a_plus.re, static_limit.a_minus, max_relative = 1e-15);
        assert_eq!(static_limit.a_plus.im, 0.0);
        assert!(adiabatic_rates(mhz(1.0), mhz(4.0), 1e20).heating_rate() < 1e-10);
    }

    #[test]
    fn closed_form_reference_values() {
        let c = steady_phonon_closed_form(41.0, khz(1.0), mhz(1.0), mhz(4.0)).unwrap();
        assert!((c.exact - 0.0818).abs() < 1e-4, "{}", c.exact);
        assert!((c.approx - 0.082).abs() < 1e-4, "{}", c.approx);
        assert_eq!(steady_phonon_closed_form(41.0, 0.0, mhz(1.0), mhz(4.0)).unwrap().exact, 0.0);
        let thermal = steady_phonon_closed_form(41.0, khz(1.0), 0.0, mhz(4.0)).unwrap();
        assert_relative_eq!(thermal.exact, 41.0, max_relative = 1e-15);
        assert!(steady_phonon_closed_form(41.0, 0.0, 0.0, mhz(4.0)).is_err());
    }

    #[test]
    fn closed_form_increases_with_qubit_decay() {
        let pts: Vec<f64> = (0..8).map(|k| mhz(1.0 + 9.0 * k as f64 / 7.0)).collect();
        let n: Vec<f64> = pts.iter().map(|&gq| steady_phonon_closed_form(41.0, khz(1.0), mhz(1.0), gq).unwrap().exact).collect();
        assert!(n.windows(2).all(|w| w[1] > w[0]), "{n:?}");
    }

    #[test]
    fn squeeze_params_reference_pair() {
        let sp = SqueezeParams::new(mhz(1.0), mhz(0.7)).unwrap();
        assert_relative_eq!(sp.theta, mhz(0.714_142_842_854_285), max_relative = 1e-12);
        assert_relative_eq!(sp.zeta.tanh(), 0.7, max_relative = 1e-12);
        assert_relative_eq!(sp.target_variance(), 0.3 / 1.7, max_relative = 1e-12);
        assert!(SqueezeParams::new(1.0, 1.0).is_err());
        assert!(SqueezeParams::new(1.0, -0.1).is_err());
    }

    #[test]
    fn residual_rates_limits_and_reference() {
        let r = residual_dissipator_rates(0.0, 2.0, 1.0);
        assert_eq!((r.up, r.down, r.two_photon), (1.0, 1.5, 0.0));
        let r = residual_dissipator_rates(0.8, 3.0, 0.0);
        assert_eq!((r.up, r.down, r.two_photon), (0.0, 0.0, 0.0));
        let zeta = 0.7f64.atanh();
        let r = residual_dissipator_rates(zeta, 2.0, 1.0);
        let s2 = zeta.sinh().powi(2);
        assert_relative_eq!(r.up, 1.0 + 2.5 * s2, max_relative = 1e-14);
        assert_relative_eq!(r.up, 3.401_961, max_relative = 1e-6);
        assert_relative_eq!(r.down, 1.5 + 2.5 * s2, max_relative = 1e-14);
        assert_relative_eq!(r.two_photon, 2.5 * zeta.cosh() * zeta.sinh(), max_relative = 1e-14);
    }

    #[test]
    fn rate_equation_relaxes_at_cool_plus_gamma() {
        let (nth, gm, cool) = (41.0, khz(1.0), mhz(0.5));
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 2e-8).collect();
        let n = rate_equation(41.0, nth, gm, cool, &times).unwrap();
        let fixed = rate_equation_fixed_point(nth, gm, cool);
        // Fit ln(n − n*) against t.
        let ys: Vec<f64> = n.iter().map(|v| (v - fixed).ln()).collect();
        let k = times.len() as f64;
        let mt = times.iter().sum::<f64>() / k;
        let my = ys.iter().sum::<f64>() / k;
        let slope = times.iter().zip(&ys).map(|(t, y)| (t - mt) * (y - my)).sum::<f64>()
            / times.iter().map(|t| (t - mt).powi(2)).sum::<f64>();
        assert_relative_eq!(-slope, cool + gm, max_relative = 1e-6);
        let thermal = rate_equation(0.0, nth, gm, 0.0, &[1e9]).unwrap();
        assert_relative_eq!(thermal[0], nth, max_relative = 1e-9);
    }

    proptest! {
        #[test]
        fn fixed_point_matches_closed_form(nth in 0.0f64..100.0, gm in 1.0f64..1e5, g in 1e3f64..1e7, gq in 1e5f64..1e8) {
            let c = steady_phonon_closed_form(nth, gm, g, gq).unwrap();
            let cool = 2.0 * g * g / gq;
            let fp = rate_equation_fixed_point(nth, gm, cool);
            prop_assert!((c.exact - fp).abs() <= 1e-12 * fp.max(1e-300));
            // The exact value sits below the approximation, by less than γΓ/2g² relative.
            prop_assert!(c.exact <= c.approx);
            if nth > 0.0 {
                let gap = (c.approx - c.exact) / c.approx;
                prop_assert!(gap < gm * gq / (2.0 * g * g) + 1e-15);
            }
        }

        #[test]
        fn rates_are_ordered(g in 1e3f64..1e7, gq in 1e5f64..1e8, w in 0.0f64..1e9) {
            let r = adiabatic_rates(g, gq, w);
            prop_assert!(r.a_minus >= r.heating_rate());
            let ratio = r.heating_rate() / r.a_minus;
            prop_assert!((ratio - gq * gq / (gq * gq + 4.0 * w * w)).abs() < 1e-12);
            prop_assert!(adiabatic_rates(g, gq * 1.5, w).a_minus < r.a_minus);
        }
    }
}
