//! Physical constants and the unit conventions used at configuration boundaries.

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Angular frequency for a value quoted as "2π × `mhz` MHz".
pub fn mhz(mhz: f64) -> f64 {
    2.0 * PI * mhz * 1e6
}

/// Angular frequency for a value quoted as "2π × `khz` kHz".
pub fn khz(khz: f64) -> f64 {
    2.0 * PI * khz * 1e3
}

/// Inverse of [`mhz`].
pub fn to_mhz(angular: f64) -> f64 {
    angular / (2.0 * PI * 1e6)
}

/// Bose–Einstein occupation of a mode at angular frequency `omega` and temperature `t`.
/// Returns 0 at zero temperature.
pub fn bose_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * temperature);
    1.0 / x.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bose_factor_limits() {
        assert_eq!(bose_occupation(mhz(50.0), 0.0), 0.0);
        assert!(bose_occupation(mhz(50.0), 1e-6) < 1e-12);
        let n = bose_occupation(mhz(50.0), 0.1);
        assert!((n - 41.0).abs() < 0.5, "n_th = {n}");
    }

    #[test]
    fn mhz_round_trip() {
        assert!((to_mhz(mhz(4.0)) - 4.0).abs() < 1e-12);
    }
}
