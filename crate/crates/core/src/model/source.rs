use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::RodGeometry;
use crate::error::{Result, RodError};

/// Chopped-cosine axial power shape, expressed as a sine over the extrapolated fuel length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatSource {
    /// Peak linear heat generation rate q'_0 [W/m].
    pub peak_lhgr: f64,
    /// Extrapolation length added at each end of the fuel stack [m].
    pub extrapolation_length: f64,
}

impl Default for HeatSource {
    fn default() -> Self {
        Self {
            peak_lhgr: 20_000.0,
            extrapolation_length: 0.08,
        }
    }
}

impl HeatSource {
    pub fn new(peak_lhgr: f64, extrapolation_length: f64) -> Result<Self> {
        let src = Self {
            peak_lhgr,
            extrapolation_length,
        };
        src.validate()?;
        Ok(src)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peak_lhgr.is_finite() && self.peak_lhgr >= 0.0) {
            return Err(RodError::config("peak LHGR must be finite and >= 0"));
        }
        if !(self.extrapolation_length.is_finite() && self.extrapolation_length >= 0.0) {
            return Err(RodError::config("extrapolation length must be finite and >= 0"));
        }
        Ok(())
    }

    /// L_e = L_f + 2 delta_e.
    pub fn extrapolated_length(&self, geom: &RodGeometry) -> f64 {
        geom.fuel_length + 2.0 * self.extrapolation_length
    }

    fn phase(&self, z: f64, geom: &RodGeometry) -> f64 {
        PI * (z - geom.fuel_bottom + self.extrapolation_length) / self.extrapolated_length(geom)
    }

    /// Linear heat rate q'(z) [W/m]; zero outside the fuel span.
    pub fn linear_heat_rate(&self, z: f64, geom: &RodGeometry) -> Result<f64> {
        if !(0.0..=geom.rod_length).contains(&z) {
            return Err(RodError::domain(format!(
                "z = {z} outside rod [0, {}]",
                geom.rod_length
            )));
        }
        if !geom.in_fuel_span(z) {
            return Ok(0.0);
        }
        Ok((self.peak_lhgr * self.phase(z, geom).sin()).max(0.0))
    }

    /// Exact integral of q' over [z0, z1] clipped to the fuel span [W].
    pub fn power_between(&self, z0: f64, z1: f64, geom: &RodGeometry) -> f64 {
        let a = z0.max(geom.fuel_bottom);
        let b = z1.min(geom.fuel_top());
        if b <= a {
            return 0.0;
        }
        let le = self.extrapolated_length(geom);
        self.peak_lhgr * le / PI * (self.phase(a, geom).cos() - self.phase(b, geom).cos())
    }

    /// Total rod power [W].
    pub fn total_power(&self, geom: &RodGeometry) -> f64 {
        self.power_between(geom.fuel_bottom, geom.fuel_top(), geom)
    }
}

/// Free-function form of [`HeatSource::linear_heat_rate`].
pub fn linear_heat_rate(z: f64, src: &HeatSource, geom: &RodGeometry) -> Result<f64> {
    src.linear_heat_rate(z, geom)
}
