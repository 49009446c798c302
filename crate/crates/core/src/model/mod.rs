//! Shared domain types: geometry, mesh, material and coolant properties, heat source.

mod boundary;
mod geometry;
pub mod materials;
pub mod mesh;
mod source;
pub mod water;

pub use boundary::ChannelBoundary;
pub use geometry::RodGeometry;
pub use materials::{clad_conductivity, fuel_conductivity, MaterialParams};
pub use mesh::{build_rod_mesh, BoundaryTag, MeshNode, MeshResolution, Region, RegionGrid, RodMesh};
pub use source::{linear_heat_rate, HeatSource};
pub use water::{water_properties, WaterProps};
