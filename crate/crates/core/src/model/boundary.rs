use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::RodGeometry;
use crate::error::{Result, RodError};

/// Coolant subchannel boundary conditions. Flow area and hydraulic diameter
/// are derived from the square-lattice pitch and the cladding outer radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelBoundary {
    /// Inlet temperature [K].
    pub inlet_temperature: f64,
    /// Outlet pressure [Pa].
    pub outlet_pressure: f64,
    /// Mass flux G [kg/s m^2].
    pub mass_flux: f64,
    /// Square-lattice rod pitch [m].
    pub pitch: f64,
}

impl Default for ChannelBoundary {
    fn default() -> Self {
        Self {
            inlet_temperature: 583.15,
            outlet_pressure: 15.51e6,
            mass_flux: 3244.04,
            pitch: 0.0126,
        }
    }
}

impl ChannelBoundary {
    pub fn validate(&self, geom: &RodGeometry) -> Result<()> {
        if !(self.inlet_temperature > 273.15) {
            return Err(RodError::config("inlet temperature must exceed 273.15 K"));
        }
        if !(self.outlet_pressure > 0.0) {
            return Err(RodError::config("outlet pressure must be positive"));
        }
        if !(self.mass_flux > 0.0) {
            return Err(RodError::config("mass flux must be positive"));
        }
        if !(self.pitch > geom.clad_outer_diameter()) {
            return Err(RodError::config("pitch must exceed the cladding outer diameter"));
        }
        Ok(())
    }

    /// Flow area per rod, pitch^2 - pi R_co^2 [m^2].
    pub fn flow_area(&self, geom: &RodGeometry) -> f64 {
        self.pitch * self.pitch - PI * geom.clad_outer_radius.powi(2)
    }

    /// Wetted (and heated) perimeter per rod [m].
    pub fn heated_perimeter(&self, geom: &RodGeometry) -> f64 {
        2.0 * PI * geom.clad_outer_radius
    }

    /// D_h = 4 A / P_wetted [m].
    pub fn hydraulic_diameter(&self, geom: &RodGeometry) -> f64 {
        4.0 * self.flow_area(geom) / self.heated_perimeter(geom)
    }

    pub fn pitch_to_diameter(&self, geom: &RodGeometry) -> f64 {
        self.pitch / geom.clad_outer_diameter()
    }

    /// Mass flow rate per rod [kg/s].
    pub fn mass_flow(&self, geom: &RodGeometry) -> f64 {
        self.mass_flux * self.flow_area(geom)
    }
}
