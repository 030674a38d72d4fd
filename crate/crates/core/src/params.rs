#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.0545718e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380649e-23;
/// The closed-form coefficients need `1/(ħβ) > HIGH_TEMPERATURE_MARGIN · ω_c`.
pub const HIGH_TEMPERATURE_MARGIN: f64 = 10.0;

/// Reservoir and trap parameters.
///
/// Frequencies and rates are angular (rad/s), times are in seconds. The cutoff
/// is stored through the ratio `r = ω_c/ω₀`, so `omega_c()` is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    alpha: f64,
    omega0: f64,
    r: f64,
    temperature: f64,
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}

impl PhysicalParams {
    /// Validates the parameter set. Outside the high-temperature regime a
    /// warning is logged; the set is still accepted.
    pub fn new(alpha: f64, omega0: f64, r: f64, temperature: f64) -> Result<Self> {
        let params = Self {
            alpha: positive("alpha", alpha)?,
            omega0: positive("omega0", omega0)?,
            r: positive("r", r)?,
            temperature: positive("temperature", temperature)?,
        };
        if !params.is_high_temperature() {
            log::warn!(
                "1/(ħβ) = {:.3e} rad/s is not above {}·ω_c = {:.3e} rad/s; \
                 the closed-form coefficients assume the high-temperature regime",
                params.thermal_frequency(),
                HIGH_TEMPERATURE_MARGIN,
                HIGH_TEMPERATURE_MARGIN * params.omega_c()
            );
        }
        Ok(params)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.omega0, self.r, self.temperature)
    }

    pub fn with_r(self, r: f64) -> Result<Self> {
        Self::new(self.alpha, self.omega0, r, self.temperature)
    }

    pub fn with_temperature(self, temperature: f64) -> Result<Self> {
        Self::new(self.alpha, self.omega0, self.r, temperature)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn omega_c(&self) -> f64 {
        self.r * self.omega0
    }

    /// Temperature in kelvin.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `β = 1/(k_B T)` in J⁻¹.
    pub fn beta(&self) -> f64 {
        1.0 / (K_B * self.temperature)
    }

    /// `1/(ħβ) = k_B T/ħ` in rad/s.
    pub fn thermal_frequency(&self) -> f64 {
        K_B * self.temperature / HBAR
    }

    /// The dimensionless `ħβω₀`.
    pub fn hbar_beta_omega0(&self) -> f64 {
        HBAR * self.omega0 * self.beta()
    }

    pub fn is_high_temperature(&self) -> bool {
        self.thermal_frequency() > HIGH_TEMPERATURE_MARGIN * self.omega_c()
    }

    /// Exact Bose occupation `n(ω₀)`.
    pub fn trap_occupation(&self) -> f64 {
        1.0 / self.hbar_beta_omega0().exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let p = PhysicalParams::new(0.1, 1e7, 10.0, 300.0).unwrap();
        assert_eq!(p.omega_c(), 1e8);
        assert!((p.beta() * K_B * 300.0 - 1.0).abs() < 1e-15);
        assert!(p.is_high_temperature());
        let cold = p.with_temperature(0.010).unwrap();
        // 1/(ħβ) ≈ 1.31e9 rad/s, one order above ω_c = 1e8.
        assert!((cold.thermal_frequency() / 1.3092e9 - 1.0).abs() < 1e-3);
        assert!(cold.is_high_temperature());
        assert!(!p.with_temperature(1e-4).unwrap().is_high_temperature());
    }

    #[test]
    fn rejects_non_positive() {
        for (a, w, r, t) in [
            (0.0, 1e7, 10.0, 300.0),
            (0.1, -1e7, 10.0, 300.0),
            (0.1, 1e7, -1.0, 300.0),
            (0.1, 1e7, 10.0, 0.0),
            (f64::NAN, 1e7, 10.0, 300.0),
        ] {
            assert!(matches!(
                PhysicalParams::new(a, w, r, t),
                Err(Error::InvalidParameter { .. })
            ));
        }
    }
}
