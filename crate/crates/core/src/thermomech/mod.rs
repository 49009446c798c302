//! Thermoelastic slice mechanics and cladding hoop-strain decomposition.
//!
//! Each axial slice is a generalized-plane-strain cylinder (uniform axial
//! strain chosen to carry the end load). With in-plane expansion `a` and
//! axial expansion `a_z`, eliminating the axial stress leaves an in-plane
//! problem with effective eigenstrain `e = (a + nu a_z)(T - T_ref)`, whose
//! displacement is
//!
//! `u = (1 + nu')/r int_a^r e s ds + C1 r + C2 / r`, `nu' = nu / (1 - nu)`,
//!
//! with the constants fixed by the radial tractions. The radial integral is
//! exact for the piecewise-linear nodal temperature.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::conduction::TemperatureField;
use crate::error::{Result, RodError};
use crate::model::{HeatSource, MaterialParams, Region, RodGeometry};

/// Lowest temperature accepted relative to the stress-free reference [K].
const T_BELOW_REF: f64 = 50.0;

/// Heavy-metal density of 95 % dense UO2 [kgU/m^3].
pub const UO2_HEAVY_METAL_DENSITY: f64 = 10_970.0 * 0.95 * 238.03 / 270.03;

fn check_temperature(t: f64, m: &MaterialParams) -> Result<()> {
    if !(t >= m.reference_temperature - T_BELOW_REF) {
        return Err(RodError::domain(format!(
            "T = {t} K below T_ref - {T_BELOW_REF} K ({} K)",
            m.reference_temperature - T_BELOW_REF
        )));
    }
    Ok(())
}

/// Free thermal hoop strain at every node: `a_theta (T - T_ref)` in the
/// cladding, isotropic `a_f (T - T_ref)` in the fuel.
pub fn thermal_expansion_strain(field: &TemperatureField, m: &MaterialParams) -> Result<Vec<f64>> {
    field
        .mesh
        .nodes()
        .zip(&field.values)
        .map(|(n, &t)| {
            check_temperature(t, m)?;
            let a = match n.region {
                Region::Fuel => m.fuel_alpha,
                Region::Cladding => m.clad_alpha_hoop,
            };
            Ok(a * (t - m.reference_temperature))
        })
        .collect()
}

/// Elastic and expansion constants of one slice material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceMaterial {
    pub youngs: f64,
    pub poisson: f64,
    pub alpha_in_plane: f64,
    pub alpha_axial: f64,
    pub t_ref: f64,
}

impl SliceMaterial {
    pub fn cladding(m: &MaterialParams) -> Self {
        Self {
            youngs: m.clad_youngs_modulus,
            poisson: m.clad_poisson,
            alpha_in_plane: m.clad_alpha_hoop,
            alpha_axial: m.clad_alpha_axial,
            t_ref: m.reference_temperature,
        }
    }

    pub fn fuel(m: &MaterialParams) -> Self {
        Self {
            youngs: m.fuel_youngs_modulus,
            poisson: m.fuel_poisson,
            alpha_in_plane: m.fuel_alpha,
            alpha_axial: m.fuel_alpha,
            t_ref: m.reference_temperature,
        }
    }
}

/// Stresses [Pa] and strains on the radial nodes of one slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceStress {
    pub r: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub sigma_theta: Vec<f64>,
    pub sigma_z: Vec<f64>,
    /// Uniform axial strain of the slice.
    pub axial_strain: f64,
    /// Hooke's-law hoop strain `(s_theta - nu (s_r + s_z)) / E`.
    pub elastic_hoop: Vec<f64>,
}

/// Generalized-plane-strain slice with radial tractions `-p_in` at `r[0]`
/// (ignored when `r[0] == 0`, a solid cylinder) and `-p_out` at the outer
/// radius, carrying axial force `axial_force` [N].
pub fn solve_slice(
    r: &[f64],
    t: &[f64],
    p_in: f64,
    p_out: f64,
    axial_force: f64,
    c: &SliceMaterial,
) -> Result<SliceStress> {
    let n = r.len();
    if n < 2 || t.len() != n {
        return Err(RodError::Structural(format!(
            "slice with {n} radii and {} temperatures",
            t.len()
        )));
    }
    let (a, b) = (r[0], r[n - 1]);
    if !(a >= 0.0 && b > a) || r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RodError::config(format!("degenerate slice annulus [{a}, {b}]")));
    }
    let (e_mod, nu) = (c.youngs, c.poisson);
    let ep = e_mod / (1.0 - nu * nu);
    let nup = nu / (1.0 - nu);
    let a_star = c.alpha_in_plane + nu * c.alpha_axial;
    let e: Vec<f64> = t.iter().map(|&tk| a_star * (tk - c.t_ref)).collect();

    // I(r) = int_a^r e s ds, Simpson per segment (exact: e linear, integrand quadratic).
    let mut big_i = vec![0.0; n];
    for k in 0..n - 1 {
        let (r0, r1) = (r[k], r[k + 1]);
        let rm = 0.5 * (r0 + r1);
        let em = 0.5 * (e[k] + e[k + 1]);
        big_i[k + 1] = big_i[k] + (r1 - r0) / 6.0 * (e[k] * r0 + 4.0 * em * rm + e[k + 1] * r1);
    }
    let i_over_r2 = |k: usize| {
        if r[k] == 0.0 {
            0.5 * e[k]
        } else {
            big_i[k] / (r[k] * r[k])
        }
    };

    // sigma_r = -E' I/r^2 + K - E' B / ((1 + nu') r^2)
    let (k_const, b_const) = if a == 0.0 {
        (-p_out + ep * i_over_r2(n - 1), 0.0)
    } else {
        let bb = (1.0 + nup) * (p_out - p_in - ep * big_i[n - 1] / (b * b)) / (ep * (1.0 / (b * b) - 1.0 / (a * a)));
        (-p_in + ep * bb / ((1.0 + nup) * a * a), bb)
    };
    let hole = |k: usize| {
        if r[k] == 0.0 {
            0.0
        } else {
            ep * b_const / ((1.0 + nup) * r[k] * r[k])
        }
    };
    let sigma_r: Vec<f64> = (0..n).map(|k| -ep * i_over_r2(k) + k_const - hole(k)).collect();
    let sigma_theta: Vec<f64> = (0..n)
        .map(|k| ep * i_over_r2(k) + k_const + hole(k) - ep * e[k])
        .collect();

    // sigma_z = E eps0 + g(r), g = -E a_z dT + nu (s_r + s_t); eps0 from the axial force.
    let g: Vec<f64> = (0..n)
        .map(|k| -e_mod * c.alpha_axial * (t[k] - c.t_ref) + nu * (sigma_r[k] + sigma_theta[k]))
        .collect();
    let mut g_force = 0.0;
    for k in 0..n - 1 {
        let (r0, r1) = (r[k], r[k + 1]);
        let rm = 0.5 * (r0 + r1);
        let gm = 0.5 * (g[k] + g[k + 1]);
        g_force += 2.0 * std::f64::consts::PI * (r1 - r0) / 6.0 * (g[k] * r0 + 4.0 * gm * rm + g[k + 1] * r1);
    }
    let area = std::f64::consts::PI * (b * b - a * a);
    let eps0 = (axial_force - g_force) / (e_mod * area);
    let sigma_z: Vec<f64> = g.iter().map(|gk| e_mod * eps0 + gk).collect();
    let elastic_hoop = (0..n)
        .map(|k| (sigma_theta[k] - nu * (sigma_r[k] + sigma_z[k])) / e_mod)
        .collect();
    Ok(SliceStress {
        r: r.to_vec(),
        sigma_r,
        sigma_theta,
        sigma_z,
        axial_strain: eps0,
        elastic_hoop,
    })
}

/// Closed-end cladding tube slice: gap pressure inside, coolant pressure
/// outside, axial force `pi (P_gap R_ci^2 - P_cool R_co^2)`.
pub fn lame_thermoelastic_slice(
    r: &[f64],
    t: &[f64],
    p_gap: f64,
    p_cool: f64,
    m: &MaterialParams,
) -> Result<SliceStress> {
    let (a, b) = (r.first().copied().unwrap_or(0.0), r.last().copied().unwrap_or(0.0));
    if !(a > 0.0 && b > a) {
        return Err(RodError::config(format!("degenerate cladding annulus [{a}, {b}]")));
    }
    let force = std::f64::consts::PI * (p_gap * a * a - p_cool * b * b);
    solve_slice(r, t, p_gap, p_cool, force, &SliceMaterial::cladding(m))
}

/// Solid pellet slice loaded by the gap pressure on its surface and ends.
pub fn fuel_slice(r: &[f64], t: &[f64], p_gap: f64, m: &MaterialParams) -> Result<SliceStress> {
    let b = r.last().copied().unwrap_or(0.0);
    let force = -std::f64::consts::PI * p_gap * b * b;
    solve_slice(r, t, p_gap, p_gap, force, &SliceMaterial::fuel(m))
}

/// Norton secondary creep `A |s|^n sign(s) exp(-Q/RT) t`.
pub fn thermal_creep_increment(sigma_theta: f64, t: f64, duration: f64, m: &MaterialParams) -> Result<f64> {
    if !(duration >= 0.0) {
        return Err(RodError::domain("creep duration must be >= 0"));
    }
    if !(t > 0.0) {
        return Err(RodError::domain(format!("creep temperature {t} K must be > 0")));
    }
    Ok(m.creep_coefficient
        * sigma_theta.abs().powf(m.creep_exponent)
        * sigma_theta.signum()
        * (-m.creep_activation / t).exp()
        * duration)
}

/// Time [s] to reach `burnup` [MWd/kgU] at the rod power of `src`.
pub fn irradiation_duration(
    burnup: f64,
    src: &HeatSource,
    geom: &RodGeometry,
    heavy_metal_density: f64,
) -> Result<f64> {
    let power = src.total_power(geom);
    if !(power > 0.0) {
        return Err(RodError::domain("irradiation duration needs positive rod power"));
    }
    let mass = heavy_metal_density * std::f64::consts::PI * geom.fuel_outer_radius.powi(2) * geom.fuel_length;
    Ok(burnup * 1.0e6 * 86_400.0 * mass / power)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermomechConfig {
    /// Pellet-cladding gap gas pressure [Pa].
    pub gap_pressure: f64,
    /// Coolant pressure [Pa].
    pub coolant_pressure: f64,
    /// Creep hold time [s].
    pub creep_duration: f64,
    /// Whether the hoop-strain summary includes pressure loading; the
    /// default evaluates thermal loading only.
    pub summary_pressure_loading: bool,
}

impl Default for ThermomechConfig {
    fn default() -> Self {
        let geom = RodGeometry::default();
        let src = HeatSource::default();
        Self {
            gap_pressure: 2.0e6,
            coolant_pressure: 15.51e6,
            creep_duration: irradiation_duration(16.7, &src, &geom, UO2_HEAVY_METAL_DENSITY)
                .expect("default source has power"),
            summary_pressure_loading: false,
        }
    }
}

impl ThermomechConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gap_pressure >= 0.0 && self.coolant_pressure >= 0.0 && self.creep_duration >= 0.0) {
            return Err(RodError::config("pressures and creep duration must be >= 0"));
        }
        Ok(())
    }
}

/// Cladding hoop-strain decomposition at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrainReport {
    pub thermal_expansion: f64,
    pub creep: f64,
    pub elastic: f64,
    /// Not modelled; always zero.
    pub irradiation_growth: f64,
    pub total: f64,
    pub r: f64,
    pub z: f64,
    pub temperature: f64,
    pub hoop_stress: f64,
    pub creep_duration: f64,
    pub run_time_s: f64,
}

fn clad_profile(field: &TemperatureField, j: usize) -> (Vec<f64>, Vec<f64>) {
    let g = &field.mesh.clad;
    (g.r.clone(), (0..g.nr()).map(|i| field.clad(i, j)).collect())
}

/// Axial node of the hottest cladding node.
fn hottest_clad_row(field: &TemperatureField) -> usize {
    let g = &field.mesh.clad;
    let mut best = (f64::NEG_INFINITY, 0);
    for j in 0..g.nz() {
        for i in 0..g.nr() {
            let t = field.clad(i, j);
            if t > best.0 {
                best = (t, j);
            }
        }
    }
    best.1
}

/// Hoop-strain components on the cladding outer surface at the elevation of
/// maximum cladding temperature, thermal loading only.
pub fn hoop_strain_summary(field: &TemperatureField, m: &MaterialParams, duration: f64) -> Result<StrainReport> {
    let cfg = ThermomechConfig {
        creep_duration: duration,
        ..Default::default()
    };
    hoop_strain_summary_with(field, m, &cfg)
}

pub fn hoop_strain_summary_with(
    field: &TemperatureField,
    m: &MaterialParams,
    cfg: &ThermomechConfig,
) -> Result<StrainReport> {
    let start = Instant::now();
    cfg.validate()?;
    m.validate()?;
    let j = hottest_clad_row(field);
    let (r, t) = clad_profile(field, j);
    for &tk in &t {
        check_temperature(tk, m)?;
    }
    let (p_gap, p_cool) = if cfg.summary_pressure_loading {
        (cfg.gap_pressure, cfg.coolant_pressure)
    } else {
        (0.0, 0.0)
    };
    let slice = lame_thermoelastic_slice(&r, &t, p_gap, p_cool, m)?;
    let k = r.len() - 1;
    let thermal = m.clad_alpha_hoop * (t[k] - m.reference_temperature);
    let creep = thermal_creep_increment(slice.sigma_theta[k], t[k], cfg.creep_duration, m)?;
    let elastic = slice.elastic_hoop[k];
    let irradiation_growth = 0.0;
    Ok(StrainReport {
        thermal_expansion: thermal,
        creep,
        elastic,
        irradiation_growth,
        total: thermal + creep + elastic + irradiation_growth,
        r: r[k],
        z: field.mesh.clad.z[j],
        temperature: t[k],
        hoop_stress: slice.sigma_theta[k],
        creep_duration: cfg.creep_duration,
        run_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Nodal stresses [Pa] in mesh node order (fuel block, then cladding).
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    pub r: Vec<f64>,
    pub z: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub sigma_z: Vec<f64>,
    pub sigma_theta: Vec<f64>,
}

/// Slice solution at every axial node of both regions.
pub fn stress_field(field: &TemperatureField, p_gap: f64, p_cool: f64, m: &MaterialParams) -> Result<StressField> {
    m.validate()?;
    for &t in &field.values {
        check_temperature(t, m)?;
    }
    let mesh = &field.mesh;
    let n = mesh.node_count();
    let mut out = StressField {
        r: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        sigma_r: vec![0.0; n],
        sigma_z: vec![0.0; n],
        sigma_theta: vec![0.0; n],
    };
    for node in mesh.nodes() {
        out.r.push(node.r);
        out.z.push(node.z);
    }
    for region in [Region::Fuel, Region::Cladding] {
        let g = mesh.grid(region);
        for j in 0..g.nz() {
            let idx: Vec<usize> = (0..g.nr())
                .map(|i| match region {
                    Region::Fuel => mesh.fuel_index(i, j),
                    Region::Cladding => mesh.clad_index(i, j),
                })
                .collect();
            let t: Vec<f64> = idx.iter().map(|&k| field.values[k]).collect();
            let s = match region {
                Region::Fuel => fuel_slice(&g.r, &t, p_gap, m)?,
                Region::Cladding => lame_thermoelastic_slice(&g.r, &t, p_gap, p_cool, m)?,
            };
            for (i, &k) in idx.iter().enumerate() {
                out.sigma_r[k] = s.sigma_r[i];
                out.sigma_z[k] = s.sigma_z[i];
                out.sigma_theta[k] = s.sigma_theta[i];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
