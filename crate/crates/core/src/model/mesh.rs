//! Structured axisymmetric node lattice over the pellet and cladding.
//!
//! Each region is a tensor-product grid in (r, z). The fuel grid spans
//! `[0, R_fo] x [z_pb, z_pb + L_f]`; the cladding grid spans
//! `[R_ci, R_co] x [0, L_fr]`. The two grids do not share nodes: the pellet
//! and cladding exchange heat through the gap conductance only.

use serde::{Deserialize, Serialize};

use super::RodGeometry;
use crate::error::{Result, RodError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Fuel,
    Cladding,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Fuel => "fuel",
            Region::Cladding => "cladding",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fuel" => Ok(Region::Fuel),
            "cladding" => Ok(Region::Cladding),
            other => Err(RodError::config(format!("unknown region tag '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Centerline,
    FuelOuter,
    CladInner,
    CladOuter,
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshResolution {
    pub nr_fuel: usize,
    pub nr_clad: usize,
    pub nz: usize,
}

impl Default for MeshResolution {
    fn default() -> Self {
        Self {
            nr_fuel: 11,
            nr_clad: 4,
            nz: 100,
        }
    }
}

impl MeshResolution {
    pub fn validate(&self) -> Result<()> {
        if self.nr_fuel < 3 {
            return Err(RodError::config(format!("nr_fuel = {} < 3", self.nr_fuel)));
        }
        if self.nr_clad < 2 {
            return Err(RodError::config(format!("nr_clad = {} < 2", self.nr_clad)));
        }
        if self.nz < 10 {
            return Err(RodError::config(format!("nz = {} < 10", self.nz)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub region: Region,
    pub r: Vec<f64>,
    pub z: Vec<f64>,
}

impl RegionGrid {
    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn nz(&self) -> usize {
        self.z.len()
    }

    pub fn node_count(&self) -> usize {
        self.r.len() * self.z.len()
    }

    pub fn cell_count(&self) -> usize {
        (self.r.len() - 1) * (self.z.len() - 1)
    }

    /// Local index of node (i radial, j axial); radial index runs fastest.
    #[inline]
    pub fn local(&self, i: usize, j: usize) -> usize {
        j * self.r.len() + i
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshNode {
    pub r: f64,
    pub z: f64,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RodMesh {
    pub geometry: RodGeometry,
    pub fuel: RegionGrid,
    pub clad: RegionGrid,
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|k| a + h * k as f64).collect();
    v[n - 1] = b;
    v
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl RodMesh {
    pub fn build(geom: &RodGeometry, res: &MeshResolution) -> Result<Self> {
        geom.validate()?;
        res.validate()?;
        let fuel = RegionGrid {
            region: Region::Fuel,
            r: linspace(0.0, geom.fuel_outer_radius, res.nr_fuel),
            z: linspace(geom.fuel_bottom, geom.fuel_top(), res.nz),
        };
        let clad = RegionGrid {
            region: Region::Cladding,
            r: linspace(geom.clad_inner_radius, geom.clad_outer_radius, res.nr_clad),
            z: linspace(0.0, geom.rod_length, res.nz),
        };
        Ok(Self {
            geometry: *geom,
            fuel,
            clad,
        })
    }

    /// Assembles a mesh from explicit per-region coordinates (e.g. read back from CSV).
    pub fn from_grids(geom: &RodGeometry, fuel: RegionGrid, clad: RegionGrid) -> Result<Self> {
        geom.validate()?;
        for g in [&fuel, &clad] {
            if g.nr() < 2 || g.nz() < 2 || !strictly_increasing(&g.r) || !strictly_increasing(&g.z) {
                return Err(RodError::config(format!(
                    "{} grid must have >= 2 strictly increasing coordinates per direction",
                    g.region.as_str()
                )));
            }
        }
        if fuel.region != Region::Fuel || clad.region != Region::Cladding {
            return Err(RodError::config("grid region tags mismatched"));
        }
        Ok(Self {
            geometry: *geom,
            fuel,
            clad,
        })
    }

    pub fn resolution(&self) -> MeshResolution {
        MeshResolution {
            nr_fuel: self.fuel.nr(),
            nr_clad: self.clad.nr(),
            nz: self.clad.nz(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.fuel.node_count() + self.clad.node_count()
    }

    pub fn cell_count(&self) -> usize {
        self.fuel.cell_count() + self.clad.cell_count()
    }

    #[inline]
    pub fn fuel_index(&self, i: usize, j: usize) -> usize {
        self.fuel.local(i, j)
    }

    #[inline]
    pub fn clad_index(&self, i: usize, j: usize) -> usize {
        self.fuel.node_count() + self.clad.local(i, j)
    }

    pub fn grid(&self, region: Region) -> &RegionGrid {
        match region {
            Region::Fuel => &self.fuel,
            Region::Cladding => &self.clad,
        }
    }

    /// Region plus (i, j) grid indices of global node `idx`.
    pub fn locate(&self, idx: usize) -> (Region, usize, usize) {
        let nf = self.fuel.node_count();
        if idx < nf {
            (Region::Fuel, idx % self.fuel.nr(), idx / self.fuel.nr())
        } else {
            let k = idx - nf;
            (Region::Cladding, k % self.clad.nr(), k / self.clad.nr())
        }
    }

    pub fn node(&self, idx: usize) -> MeshNode {
        let (region, i, j) = self.locate(idx);
        let g = self.grid(region);
        MeshNode {
            r: g.r[i],
            z: g.z[j],
            region,
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = MeshNode> + '_ {
        (0..self.node_count()).map(move |k| self.node(k))
    }

    /// Global indices of cladding outer-surface nodes, bottom to top.
    pub fn clad_outer_nodes(&self) -> Vec<usize> {
        let i = self.clad.nr() - 1;
        (0..self.clad.nz()).map(|j| self.clad_index(i, j)).collect()
    }

    pub fn boundary_tags(&self, idx: usize) -> Vec<BoundaryTag> {
        let (region, i, j) = self.locate(idx);
        let g = self.grid(region);
        let mut tags = Vec::new();
        if i == 0 {
            tags.push(match region {
                Region::Fuel => BoundaryTag::Centerline,
                Region::Cladding => BoundaryTag::CladInner,
            });
        }
        if i == g.nr() - 1 {
            tags.push(match region {
                Region::Fuel => BoundaryTag::FuelOuter,
                Region::Cladding => BoundaryTag::CladOuter,
            });
        }
        if j == 0 {
            tags.push(BoundaryTag::Bottom);
        }
        if j == g.nz() - 1 {
            tags.push(BoundaryTag::Top);
        }
        tags
    }

    pub fn boundary_nodes(&self, tag: BoundaryTag) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&k| self.boundary_tags(k).contains(&tag))
            .collect()
    }

    /// Boundary edges carrying `tag`, as pairs of global node indices.
    pub fn boundary_edges(&self, tag: BoundaryTag) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (region, grid) in [(Region::Fuel, &self.fuel), (Region::Cladding, &self.clad)] {
            let idx = |i, j| match region {
                Region::Fuel => self.fuel_index(i, j),
                Region::Cladding => self.clad_index(i, j),
            };
            let (nr, nz) = (grid.nr(), grid.nz());
            let radial_side = match (region, tag) {
                (Region::Fuel, BoundaryTag::Centerline) | (Region::Cladding, BoundaryTag::CladInner) => Some(0),
                (Region::Fuel, BoundaryTag::FuelOuter) | (Region::Cladding, BoundaryTag::CladOuter) => Some(nr - 1),
                _ => None,
            };
            if let Some(i) = radial_side {
                edges.extend((0..nz - 1).map(|j| (idx(i, j), idx(i, j + 1))));
            }
            let axial_side = match tag {
                BoundaryTag::Bottom => Some(0),
                BoundaryTag::Top => Some(nz - 1),
                _ => None,
            };
            if let Some(j) = axial_side {
                edges.extend((0..nr - 1).map(|i| (idx(i, j), idx(i + 1, j))));
            }
        }
        edges
    }

    /// Every exterior edge of both region rectangles, found by walking their perimeters.
    pub fn exterior_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for (region, grid) in [(Region::Fuel, &self.fuel), (Region::Cladding, &self.clad)] {
            let idx = |i, j| match region {
                Region::Fuel => self.fuel_index(i, j),
                Region::Cladding => self.clad_index(i, j),
            };
            let (nr, nz) = (grid.nr(), grid.nz());
            // Counter-clockwise: bottom, outer side, top, inner side.
            let mut ring = Vec::new();
            ring.extend((0..nr).map(|i| (i, 0)));
            ring.extend((1..nz).map(|j| (nr - 1, j)));
            ring.extend((0..nr - 1).rev().map(|i| (i, nz - 1)));
            ring.extend((1..nz - 1).rev().map(|j| (0, j)));
            for w in 0..ring.len() {
                let (a, b) = (ring[w], ring[(w + 1) % ring.len()]);
                let (ia, ib) = (idx(a.0, a.1), idx(b.0, b.1));
                edges.push((ia.min(ib), ia.max(ib)));
            }
        }
        edges
    }
}

/// Builds the default-cladding-resolution mesh with `nr_fuel` x `nz` fuel nodes.
pub fn build_rod_mesh(geom: &RodGeometry, nr_fuel: usize, nz: usize) -> Result<RodMesh> {
    RodMesh::build(
        geom,
        &MeshResolution {
            nr_fuel,
            nz,
            ..MeshResolution::default()
        },
    )
}
