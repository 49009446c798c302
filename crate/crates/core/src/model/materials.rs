//! Fuel and cladding property correlations.
//!
//! Fuel conductivity uses a phonon-type form `k = 1 / (A + B T)` with a
//! multiplicative burnup degradation `1 / (1 + c_bu * Bu)`; cladding
//! conductivity is a linear Zircaloy-4 fit. Mechanical and creep constants are
//! those of the slice thermoelastic model in [`crate::thermomech`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, RodError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialParams {
    /// Fuel phonon resistivity intercept A [m K/W].
    pub fuel_k_a: f64,
    /// Fuel phonon resistivity slope B [m/W].
    pub fuel_k_b: f64,
    /// Burnup degradation coefficient [1/(MWd/kgU)].
    pub fuel_k_burnup: f64,
    /// Cladding conductivity intercept [W/m K].
    pub clad_k_a: f64,
    /// Cladding conductivity slope [W/m K^2].
    pub clad_k_b: f64,
    /// Fuel isotropic thermal expansion [1/K].
    pub fuel_alpha: f64,
    pub fuel_youngs_modulus: f64,
    pub fuel_poisson: f64,
    /// Cladding hoop (and radial) thermal expansion [1/K].
    pub clad_alpha_hoop: f64,
    /// Cladding axial thermal expansion [1/K].
    pub clad_alpha_axial: f64,
    pub clad_youngs_modulus: f64,
    pub clad_poisson: f64,
    /// Pellet-cladding gap conductance [W/m^2 K].
    pub gap_conductance: f64,
    /// Norton creep prefactor A_c [1/(s Pa^n)].
    pub creep_coefficient: f64,
    /// Norton stress exponent n.
    pub creep_exponent: f64,
    /// Creep activation temperature Q/R [K].
    pub creep_activation: f64,
    /// Stress-free reference temperature [K].
    pub reference_temperature: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            fuel_k_a: 0.0452,
            fuel_k_b: 2.46e-4,
            fuel_k_burnup: 0.0064,
            clad_k_a: 12.6,
            clad_k_b: 0.0118,
            fuel_alpha: 1.0e-5,
            fuel_youngs_modulus: 2.0e11,
            fuel_poisson: 0.316,
            clad_alpha_hoop: 6.7e-6,
            clad_alpha_axial: 4.4e-6,
            clad_youngs_modulus: 7.5e10,
            clad_poisson: 0.3,
            gap_conductance: 5_000.0,
            creep_coefficient: 2.0e-11,
            creep_exponent: 1.0,
            creep_activation: 12_000.0,
            reference_temperature: 295.15,
        }
    }
}

/// Temperature window over which the conductivity invariants are checked.
const CHECK_T_MIN: f64 = 300.0;
const CHECK_T_MAX: f64 = 2500.0;

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        // Both correlations are affine in T (fuel via its resistivity), so
        // positivity at the window ends implies positivity throughout.
        for t in [CHECK_T_MIN, CHECK_T_MAX] {
            if self.fuel_k_a + self.fuel_k_b * t <= 0.0 {
                return Err(RodError::config(format!("fuel conductivity not positive at {t} K")));
            }
        }
        for t in [CLAD_T_MIN, CLAD_T_MAX] {
            if self.clad_k_a + self.clad_k_b * t <= 0.0 {
                return Err(RodError::config(format!("cladding conductivity not positive at {t} K")));
            }
        }
        if self.fuel_k_burnup < 0.0 {
            return Err(RodError::config("burnup degradation coefficient must be >= 0"));
        }
        for (name, nu) in [("clad", self.clad_poisson), ("fuel", self.fuel_poisson)] {
            if !(0.0 < nu && nu < 0.5) {
                return Err(RodError::config(format!("{name} Poisson ratio must be in (0, 0.5)")));
            }
        }
        if self.clad_youngs_modulus <= 0.0 || self.fuel_youngs_modulus <= 0.0 {
            return Err(RodError::config("Young's moduli must be positive"));
        }
        if !(self.gap_conductance > 0.0) {
            return Err(RodError::config("gap conductance must be positive"));
        }
        if self.creep_coefficient < 0.0 || self.creep_exponent <= 0.0 || self.creep_activation < 0.0 {
            return Err(RodError::config("creep constants must be non-negative (exponent > 0)"));
        }
        if !(self.reference_temperature > 0.0) {
            return Err(RodError::config("reference temperature must be positive"));
        }
        Ok(())
    }
}

pub const FUEL_T_MIN: f64 = 300.0;
pub const FUEL_T_MAX: f64 = 3000.0;
pub const CLAD_T_MIN: f64 = 300.0;
pub const CLAD_T_MAX: f64 = 1500.0;

/// UO2 conductivity [W/m K] at temperature `t` [K] and burnup [MWd/kgU].
pub fn fuel_conductivity(t: f64, burnup: f64, m: &MaterialParams) -> Result<f64> {
    if !(FUEL_T_MIN..=FUEL_T_MAX).contains(&t) {
        return Err(RodError::domain(format!(
            "fuel temperature {t} K outside [{FUEL_T_MIN}, {FUEL_T_MAX}]"
        )));
    }
    if !(burnup >= 0.0 && burnup.is_finite()) {
        return Err(RodError::domain(format!("burnup {burnup} must be >= 0")));
    }
    Ok(1.0 / (m.fuel_k_a + m.fuel_k_b * t) / (1.0 + m.fuel_k_burnup * burnup))
}

/// Zircaloy-4 conductivity [W/m K].
pub fn clad_conductivity(t: f64, m: &MaterialParams) -> Result<f64> {
    if !(CLAD_T_MIN..=CLAD_T_MAX).contains(&t) {
        return Err(RodError::domain(format!(
            "cladding temperature {t} K outside [{CLAD_T_MIN}, {CLAD_T_MAX}]"
        )));
    }
    Ok(m.clad_k_a + m.clad_k_b * t)
}
