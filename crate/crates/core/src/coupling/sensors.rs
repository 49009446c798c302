use serde::{Deserialize, Serialize};

use super::CoupledSolution;
use crate::error::{Result, RodError};
use crate::model::RodGeometry;

/// Coolant reference temperature used in the surrogate normal derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TInfPolicy {
    /// Constant channel inlet temperature; needs nothing beyond the sensor readings.
    #[default]
    Inlet,
    /// Local bulk coolant temperature at each sensor elevation.
    LocalCoolant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    /// Sensor elevations as fractions of the rod length.
    pub z_fractions: Vec<f64>,
    /// Scale of the surrogate normal derivative.
    pub eta: f64,
    pub t_inf: TInfPolicy,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            z_fractions: vec![0.2, 0.4, 0.6, 0.8],
            eta: 1.0,
            t_inf: TInfPolicy::Inlet,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self, geom: &RodGeometry) -> Result<()> {
        check_locations(&self.locations(geom), geom)?;
        check_eta(self.eta)
    }

    pub fn locations(&self, geom: &RodGeometry) -> Vec<f64> {
        self.z_fractions.iter().map(|f| f * geom.rod_length).collect()
    }
}

/// Readings on the cladding outer surface plus their quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSet {
    /// Sensor elevations [m]; all sit at r = R_co.
    pub z: Vec<f64>,
    pub radius: f64,
    pub temperature: Vec<f64>,
    pub t_inf: Vec<f64>,
    /// `-eta (T - T_inf)`.
    pub dhat: Vec<f64>,
    /// Boundary segment lengths [m].
    pub weights: Vec<f64>,
    pub eta: f64,
}

impl SensorSet {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Rebuilds the set from stored readings, recomputing the derivative surrogate.
    pub fn from_readings(
        z: Vec<f64>,
        temperature: Vec<f64>,
        t_inf: Vec<f64>,
        eta: f64,
        geom: &RodGeometry,
    ) -> Result<Self> {
        check_locations(&z, geom)?;
        check_eta(eta)?;
        if temperature.len() != z.len() || t_inf.len() != z.len() {
            return Err(RodError::Structural("sensor columns differ in length".into()));
        }
        let dhat = temperature.iter().zip(&t_inf).map(|(t, ti)| -eta * (t - ti)).collect();
        let weights = voronoi_weights(&z, geom.fuel_bottom, geom.fuel_top());
        Ok(Self {
            z,
            radius: geom.clad_outer_radius,
            temperature,
            t_inf,
            dhat,
            weights,
            eta,
        })
    }
}

fn check_locations(z: &[f64], geom: &RodGeometry) -> Result<()> {
    if z.len() < 2 {
        return Err(RodError::domain("at least two sensors are required"));
    }
    if let Some(&bad) = z.iter().find(|&&v| !(0.0..=geom.rod_length).contains(&v)) {
        return Err(RodError::domain(format!(
            "sensor z = {bad} is off the cladding outer boundary [0, {}]",
            geom.rod_length
        )));
    }
    if z.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RodError::domain("sensor elevations must be strictly increasing"));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(RodError::config("eta must be finite and >= 0"));
    }
    Ok(())
}

/// Lengths of the cells of the 1D Voronoi partition of `[lo, hi]` by the
/// sorted points `z`; sensors outside the span get the clipped remainder.
pub fn voronoi_weights(z: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let n = z.len();
    let mut edges = Vec::with_capacity(n + 1);
    edges.push(lo);
    for w in z.windows(2) {
        edges.push((0.5 * (w[0] + w[1])).clamp(lo, hi));
    }
    edges.push(hi);
    edges.windows(2).map(|e| (e[1] - e[0]).max(0.0)).collect()
}

fn interp(x: &[f64], y: &[f64], at: f64) -> f64 {
    let k = x.partition_point(|&v| v <= at).clamp(1, x.len() - 1);
    let t = (at - x[k - 1]) / (x[k] - x[k - 1]);
    y[k - 1] + t * (y[k] - y[k - 1])
}

/// Samples the cladding outer wall at `z_locations`.
pub fn extract_sensors(
    solution: &CoupledSolution,
    z_locations: &[f64],
    eta: f64,
    policy: TInfPolicy,
) -> Result<SensorSet> {
    let geom = &solution.field.mesh.geometry;
    check_locations(z_locations, geom)?;
    let zc = &solution.field.mesh.clad.z;
    let wall = solution.field.clad_outer();
    let temperature: Vec<f64> = z_locations.iter().map(|&z| interp(zc, &wall, z)).collect();
    let t_inf = match policy {
        TInfPolicy::Inlet => vec![solution.channel.t_cool[0]; z_locations.len()],
        TInfPolicy::LocalCoolant => z_locations
            .iter()
            .map(|&z| interp(&solution.channel.z, &solution.channel.t_cool, z))
            .collect(),
    };
    SensorSet::from_readings(z_locations.to_vec(), temperature, t_inf, eta, geom)
}
