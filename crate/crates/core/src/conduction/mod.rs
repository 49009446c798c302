//! Steady axisymmetric heat conduction in pellet and cladding.
//!
//! Vertex-centred finite volumes on the two region grids of [`RodMesh`]:
//! every node owns the annular control volume between its neighbouring
//! mid-points. Face conductivity is the arithmetic mean of the nodal values;
//! `k(T)` nonlinearity is resolved by Picard iteration with a banded Cholesky
//! solve per sweep. Boundary conditions: zero flux on the centreline and on
//! all top/bottom faces, gap conductance between pellet surface and cladding
//! inner surface, convective Robin condition on the cladding outer surface.

mod banded;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use banded::BandedSpd;

use crate::channel::ChannelState;
use crate::error::{Result, RodError};
use crate::model::{clad_conductivity, fuel_conductivity, HeatSource, MaterialParams, Region, RegionGrid, RodMesh};

/// Nodal temperatures on a [`RodMesh`] [K].
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField {
    pub mesh: RodMesh,
    pub values: Vec<f64>,
}

impl TemperatureField {
    pub fn new(mesh: RodMesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.node_count() {
            return Err(RodError::Structural(format!(
                "{} temperatures for {} mesh nodes",
                values.len(),
                mesh.node_count()
            )));
        }
        Ok(Self { mesh, values })
    }

    pub fn uniform(mesh: RodMesh, t: f64) -> Self {
        let n = mesh.node_count();
        Self {
            mesh,
            values: vec![t; n],
        }
    }

    pub fn fuel(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.fuel_index(i, j)]
    }

    pub fn clad(&self, i: usize, j: usize) -> f64 {
        self.values[self.mesh.clad_index(i, j)]
    }

    /// Cladding outer-surface temperatures, bottom to top.
    pub fn clad_outer(&self) -> Vec<f64> {
        self.mesh.clad_outer_nodes().iter().map(|&k| self.values[k]).collect()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Node index of the hottest node.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = k;
            }
        }
        best
    }
}

/// Volumetric heating per fuel node [W/m^3], control-volume averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumetricSource {
    /// One value per fuel node, in fuel-grid order.
    pub q_vol: Vec<f64>,
}

/// Radial and axial control-volume bounds of a grid.
fn cv_bounds(x: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let lo = if i == 0 { x[0] } else { 0.5 * (x[i - 1] + x[i]) };
            let hi = if i == n - 1 { x[n - 1] } else { 0.5 * (x[i] + x[i + 1]) };
            (lo, hi)
        })
        .collect()
}

impl VolumetricSource {
    /// Fission heating from the axial power shape, uniform over the pellet cross-section.
    pub fn from_heat_source(mesh: &RodMesh, src: &HeatSource) -> Result<Self> {
        src.validate()?;
        let geom = &mesh.geometry;
        let area = PI * geom.fuel_outer_radius.powi(2);
        let zb = cv_bounds(&mesh.fuel.z);
        let nr = mesh.fuel.nr();
        let mut q_vol = Vec::with_capacity(mesh.fuel.node_count());
        for &(lo, hi) in &zb {
            let q_avg = src.power_between(lo, hi, geom) / (hi - lo);
            q_vol.extend(std::iter::repeat(q_avg / area).take(nr));
        }
        Ok(Self { q_vol })
    }

    /// Spatially uniform heating `q_vol` [W/m^3] in the pellet.
    pub fn uniform(mesh: &RodMesh, q_vol: f64) -> Self {
        Self {
            q_vol: vec![q_vol; mesh.fuel.node_count()],
        }
    }

    pub fn zero(mesh: &RodMesh) -> Self {
        Self::uniform(mesh, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConductionOptions {
    /// Picard stopping criterion on max |dT| between sweeps [K].
    pub picard_tolerance: f64,
    pub max_picard_iterations: usize,
}

impl Default for ConductionOptions {
    fn default() -> Self {
        Self {
            picard_tolerance: 0.01,
            max_picard_iterations: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConductionOutcome {
    pub field: TemperatureField,
    /// max |dT| after each Picard sweep.
    pub residuals: Vec<f64>,
}

/// Conductive link between two nodes: conductance = k_face * factor.
#[derive(Debug, Clone, Copy)]
struct Link {
    a: usize,
    b: usize,
    factor: f64,
}

/// Mesh-dependent assembly data, reusable across Picard sweeps and coupling iterations.
#[derive(Debug, Clone)]
pub struct ConductionProblem {
    mesh: RodMesh,
    links: Vec<Link>,
    /// Fixed conductance pairs (gap): (a, b, conductance).
    gap: Vec<(usize, usize, f64)>,
    /// Cladding outer-surface area per axial node [m^2].
    robin_area: Vec<f64>,
    /// Fuel control-volume volumes, fuel-grid order [m^3].
    fuel_volume: Vec<f64>,
    /// Node -> position in the banded ordering.
    pos: Vec<usize>,
    bandwidth: usize,
}

fn grid_links(grid: &RegionGrid, offset: usize, links: &mut Vec<Link>) {
    let rb = cv_bounds(&grid.r);
    let zb = cv_bounds(&grid.z);
    let (nr, nz) = (grid.nr(), grid.nz());
    for j in 0..nz {
        let dz = zb[j].1 - zb[j].0;
        for i in 0..nr - 1 {
            let rf = rb[i].1;
            links.push(Link {
                a: offset + grid.local(i, j),
                b: offset + grid.local(i + 1, j),
                factor: 2.0 * PI * rf * dz / (grid.r[i + 1] - grid.r[i]),
            });
        }
    }
    for j in 0..nz - 1 {
        for i in 0..nr {
            let ring = PI * (rb[i].1.powi(2) - rb[i].0.powi(2));
            links.push(Link {
                a: offset + grid.local(i, j),
                b: offset + grid.local(i, j + 1),
                factor: ring / (grid.z[j + 1] - grid.z[j]),
            });
        }
    }
}

impl ConductionProblem {
    pub fn new(mesh: &RodMesh, m: &MaterialParams) -> Result<Self> {
        m.validate()?;
        let mut links = Vec::new();
        grid_links(&mesh.fuel, 0, &mut links);
        grid_links(&mesh.clad, mesh.fuel.node_count(), &mut links);

        let geom = &mesh.geometry;
        let fz = cv_bounds(&mesh.fuel.z);
        let cz = cv_bounds(&mesh.clad.z);
        let mut gap = Vec::new();
        let i_fo = mesh.fuel.nr() - 1;
        for (j, &(a0, a1)) in fz.iter().enumerate() {
            for (k, &(b0, b1)) in cz.iter().enumerate() {
                let overlap = a1.min(b1) - a0.max(b0);
                if overlap > 0.0 {
                    gap.push((
                        mesh.fuel_index(i_fo, j),
                        mesh.clad_index(0, k),
                        m.gap_conductance * 2.0 * PI * geom.fuel_outer_radius * overlap,
                    ));
                }
            }
        }
        let robin_area = cz
            .iter()
            .map(|&(lo, hi)| 2.0 * PI * geom.clad_outer_radius * (hi - lo))
            .collect();
        let rb = cv_bounds(&mesh.fuel.r);
        let mut fuel_volume = Vec::with_capacity(mesh.fuel.node_count());
        for &(lo, hi) in &fz {
            for &(r0, r1) in &rb {
                fuel_volume.push(PI * (r1 * r1 - r0 * r0) * (hi - lo));
            }
        }

        // Interleave both grids by axial coordinate to keep couplings near the diagonal.
        let mut order: Vec<(f64, u8, usize)> = (0..mesh.node_count())
            .map(|k| {
                let (region, _, j) = mesh.locate(k);
                (mesh.grid(region).z[j], (region == Region::Cladding) as u8, k)
            })
            .collect();
        order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut pos = vec![0; mesh.node_count()];
        for (p, &(_, _, k)) in order.iter().enumerate() {
            pos[k] = p;
        }
        let bandwidth = links
            .iter()
            .map(|l| (l.a, l.b))
            .chain(gap.iter().map(|&(a, b, _)| (a, b)))
            .map(|(a, b)| pos[a].abs_diff(pos[b]))
            .max()
            .unwrap_or(0);

        Ok(Self {
            mesh: mesh.clone(),
            links,
            gap,
            robin_area,
            fuel_volume,
            pos,
            bandwidth,
        })
    }

    pub fn mesh(&self) -> &RodMesh {
        &self.mesh
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Heat generated in each fuel control volume [W].
    pub fn node_power(&self, src: &VolumetricSource) -> Vec<f64> {
        src.q_vol.iter().zip(&self.fuel_volume).map(|(q, v)| q * v).collect()
    }

    fn nodal_conductivity(&self, t: &[f64], m: &MaterialParams, burnup: f64) -> Result<Vec<f64>> {
        let nf = self.mesh.fuel.node_count();
        t.iter()
            .enumerate()
            .map(|(k, &tk)| {
                if k < nf {
                    fuel_conductivity(tk, burnup, m)
                } else {
                    clad_conductivity(tk, m)
                }
            })
            .collect()
    }

    fn check_inputs(&self, src: &VolumetricSource, coolant: &ChannelState) -> Result<()> {
        if src.q_vol.len() != self.mesh.fuel.node_count() {
            return Err(RodError::Structural(format!(
                "source has {} values for {} fuel nodes",
                src.q_vol.len(),
                self.mesh.fuel.node_count()
            )));
        }
        let nz = self.mesh.clad.nz();
        if coolant.len() != nz || coolant.t_cool.len() != nz || coolant.htc.len() != nz {
            return Err(RodError::Structural(format!(
                "coolant state has {} nodes, cladding has {nz} axial nodes",
                coolant.len()
            )));
        }
        for (a, b) in coolant.z.iter().zip(&self.mesh.clad.z) {
            if (a - b).abs() > 1e-9 * (1.0 + b.abs()) {
                return Err(RodError::Structural(
                    "coolant axial nodes differ from cladding axial nodes".into(),
                ));
            }
        }
        Ok(())
    }

    /// Picard-iterated steady solve, warm-started from `initial` when given.
    pub fn solve(
        &self,
        m: &MaterialParams,
        src: &VolumetricSource,
        coolant: &ChannelState,
        burnup: f64,
        initial: Option<&[f64]>,
        opts: &ConductionOptions,
    ) -> Result<ConductionOutcome> {
        self.check_inputs(src, coolant)?;
        let n = self.mesh.node_count();
        let mut t: Vec<f64> = match initial {
            Some(t0) if t0.len() == n => t0.to_vec(),
            Some(t0) => {
                return Err(RodError::Structural(format!(
                    "initial guess has {} values for {n} nodes",
                    t0.len()
                )))
            }
            None => vec![coolant.t_cool[0]; n],
        };
        let power = self.node_power(src);
        let outer = self.mesh.clad_outer_nodes();
        let mut mat = BandedSpd::zeros(n, self.bandwidth);
        let mut residuals = Vec::new();

        for _ in 0..opts.max_picard_iterations {
            let k = self.nodal_conductivity(&t, m, burnup)?;
            mat.clear();
            let mut rhs = vec![0.0; n];
            for l in &self.links {
                let c = 0.5 * (k[l.a] + k[l.b]) * l.factor;
                let (pa, pb) = (self.pos[l.a], self.pos[l.b]);
                mat.add(pa, pa, c);
                mat.add(pb, pb, c);
                mat.add(pa, pb, -c);
            }
            for &(a, b, c) in &self.gap {
                let (pa, pb) = (self.pos[a], self.pos[b]);
                mat.add(pa, pa, c);
                mat.add(pb, pb, c);
                mat.add(pa, pb, -c);
            }
            for (j, &node) in outer.iter().enumerate() {
                let c = coolant.htc[j] * self.robin_area[j];
                let p = self.pos[node];
                mat.add(p, p, c);
                rhs[p] += c * coolant.t_cool[j];
            }
            for (f, &q) in power.iter().enumerate() {
                rhs[self.pos[f]] += q;
            }
            mat.factorize()?;
            let sol = mat.solve_factored(&rhs);
            let mut delta: f64 = 0.0;
            for (node, tk) in t.iter_mut().enumerate() {
                let v = sol[self.pos[node]];
                delta = delta.max((v - *tk).abs());
                *tk = v;
            }
            if !delta.is_finite() {
                return Err(RodError::NonConvergence {
                    solver: "conduction Picard",
                    residuals,
                });
            }
            residuals.push(delta);
            if delta < opts.picard_tolerance {
                return Ok(ConductionOutcome {
                    field: TemperatureField {
                        mesh: self.mesh.clone(),
                        values: t,
                    },
                    residuals,
                });
            }
        }
        Err(RodError::NonConvergence {
            solver: "conduction Picard",
            residuals,
        })
    }

    /// Heat leaving through the cladding outer surface [W].
    pub fn boundary_heat_out(&self, field: &TemperatureField, coolant: &ChannelState) -> f64 {
        self.mesh
            .clad_outer_nodes()
            .iter()
            .enumerate()
            .map(|(j, &k)| coolant.htc[j] * self.robin_area[j] * (field.values[k] - coolant.t_cool[j]))
            .sum()
    }
}

/// One-shot solve: builds the problem for `mesh` and runs Picard with default options.
pub fn assemble_and_solve_conduction(
    mesh: &RodMesh,
    m: &MaterialParams,
    src: &VolumetricSource,
    coolant: &ChannelState,
    burnup: f64,
) -> Result<TemperatureField> {
    let problem = ConductionProblem::new(mesh, m)?;
    Ok(problem
        .solve(m, src, coolant, burnup, None, &ConductionOptions::default())?
        .field)
}

/// Convective heat flux into the coolant on the cladding outer surface [W/m^2].
pub fn wall_heat_flux(field: &TemperatureField, coolant: &ChannelState) -> Result<Vec<f64>> {
    let wall = field.clad_outer();
    if wall.len() != coolant.len() {
        return Err(RodError::Structural(format!(
            "{} wall nodes vs {} coolant nodes",
            wall.len(),
            coolant.len()
        )));
    }
    Ok(wall
        .iter()
        .zip(coolant.htc.iter().zip(&coolant.t_cool))
        .map(|(tw, (h, tc))| h * (tw - tc))
        .collect())
}
