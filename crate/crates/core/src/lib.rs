//! Fuel-rod thermal digital twin.
//!
//! * [`model`]: geometry, mesh, property correlations, axial power shape.
//! * [`channel`]: steady single-phase coolant subchannel.
//! * [`conduction`]: axisymmetric pellet/cladding conduction.
//! * [`coupling`]: rod-channel fixed-point coupling, case rosters, datasets, sensors.
//! * [`khnet`]: boundary-integral reconstruction network and its trainer.
//! * [`thermomech`]: cladding hoop strain and slice stresses.
//! * [`metrics`] and [`io`]: evaluation metrics and file formats.

// Range checks are written `!(x > 0.0)` so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod conduction;
pub mod coupling;
pub mod error;
pub mod io;
pub mod khnet;
pub mod metrics;
pub mod model;
pub mod thermomech;

pub use error::{Result, RodError};
