use serde::{Deserialize, Serialize};

use crate::error::{Result, RodError};

/// Axisymmetric fuel-rod dimensions. All lengths in metres, z = 0 at the cladding bottom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RodGeometry {
    /// Rod (cladding) length.
    pub rod_length: f64,
    /// Fuel stack length.
    pub fuel_length: f64,
    pub fuel_outer_radius: f64,
    pub clad_inner_radius: f64,
    pub clad_outer_radius: f64,
    /// Axial coordinate of the fuel stack bottom.
    pub fuel_bottom: f64,
}

impl Default for RodGeometry {
    /// Full-length PWR rod (17x17 lattice, UO2 / Zircaloy-4).
    fn default() -> Self {
        Self {
            rod_length: 3.876,
            fuel_length: 3.658,
            fuel_outer_radius: 0.004096,
            clad_inner_radius: 0.0041786,
            clad_outer_radius: 0.0047506,
            fuel_bottom: 0.0,
        }
    }
}

impl RodGeometry {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.rod_length,
            self.fuel_length,
            self.fuel_outer_radius,
            self.clad_inner_radius,
            self.clad_outer_radius,
            self.fuel_bottom,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(RodError::config("geometry contains non-finite values"));
        }
        if !(0.0 < self.fuel_outer_radius
            && self.fuel_outer_radius < self.clad_inner_radius
            && self.clad_inner_radius < self.clad_outer_radius)
        {
            return Err(RodError::config("radii must satisfy 0 < R_fo < R_ci < R_co"));
        }
        if !(0.0 < self.fuel_length && self.fuel_length <= self.rod_length) {
            return Err(RodError::config("lengths must satisfy 0 < L_f <= L_fr"));
        }
        if !(0.0 <= self.fuel_bottom && self.fuel_bottom <= self.rod_length - self.fuel_length) {
            return Err(RodError::config("fuel bottom must satisfy 0 <= z_pb <= L_fr - L_f"));
        }
        Ok(())
    }

    pub fn fuel_top(&self) -> f64 {
        self.fuel_bottom + self.fuel_length
    }

    /// Whether `z` lies in the heated (fuelled) span, ends included.
    pub fn in_fuel_span(&self, z: f64) -> bool {
        z >= self.fuel_bottom && z <= self.fuel_top()
    }

    pub fn clad_thickness(&self) -> f64 {
        self.clad_outer_radius - self.clad_inner_radius
    }

    pub fn clad_outer_diameter(&self) -> f64 {
        2.0 * self.clad_outer_radius
    }
}
