//! Rod-channel fixed-point coupling and the case pipeline built on it.
//!
//! The exchange per Picard sweep: the rod is solved against the current
//! coolant temperature and HTC; its outer-wall flux drives a channel solve;
//! the new coolant temperature is under-relaxed before the next rod solve.

mod dataset;
mod sensors;

pub use dataset::{burnup_sweep, generate_dataset, reference_roster, CaseRecord, Dataset, Normalization, SweepConfig};
pub use sensors::{extract_sensors, voronoi_weights, SensorConfig, SensorSet, TInfPolicy};

use serde::{Deserialize, Serialize};

use crate::channel::{solve_channel, ChannelState};
use crate::conduction::{wall_heat_flux, ConductionOptions, ConductionProblem, TemperatureField, VolumetricSource};
use crate::error::{Result, RodError};
use crate::model::{ChannelBoundary, HeatSource, MaterialParams, MeshResolution, RodGeometry, RodMesh};

/// Lower edge of the peak-LHGR roster range [W/m]; zero power is also accepted.
pub const PEAK_LHGR_MIN: f64 = 5_000.0;
pub const PEAK_LHGR_MAX: f64 = 45_000.0;
/// Upper burnup bound of the fuel conductivity degradation fit [MWd/kgU].
pub const BURNUP_MAX: f64 = 75.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validate,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validate, Split::Test];

    pub fn as_str(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validate => "validate",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingOptions {
    /// Under-relaxation on the coolant temperature.
    pub relaxation: f64,
    /// Convergence threshold on max |dT_wall| between rod solves [K].
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self {
            relaxation: 0.7,
            tolerance: 0.1,
            max_iterations: 50,
        }
    }
}

impl CouplingOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(RodError::config("coupling relaxation must lie in (0, 1]"));
        }
        if !(self.tolerance > 0.0) || self.max_iterations < 2 {
            return Err(RodError::config(
                "coupling tolerance must be > 0 and max_iterations >= 2",
            ));
        }
        Ok(())
    }
}

/// Everything a case shares with its siblings: geometry, materials, channel,
/// power shape, mesh, solver settings and sensor layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub geometry: RodGeometry,
    pub materials: MaterialParams,
    pub channel: ChannelBoundary,
    /// Axial power extrapolation length [m].
    pub extrapolation_length: f64,
    pub mesh: MeshResolution,
    pub conduction: ConductionOptions,
    pub coupling: CouplingOptions,
    pub sensors: SensorConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            geometry: RodGeometry::default(),
            materials: MaterialParams::default(),
            channel: ChannelBoundary::default(),
            extrapolation_length: HeatSource::default().extrapolation_length,
            mesh: MeshResolution::default(),
            conduction: ConductionOptions::default(),
            coupling: CouplingOptions::default(),
            sensors: SensorConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.materials.validate()?;
        self.channel.validate(&self.geometry)?;
        self.mesh.validate()?;
        self.coupling.validate()?;
        self.sensors.validate(&self.geometry)?;
        HeatSource::new(0.0, self.extrapolation_length)?;
        Ok(())
    }

    pub fn build_mesh(&self) -> Result<RodMesh> {
        RodMesh::build(&self.geometry, &self.mesh)
    }

    pub fn heat_source(&self, peak_lhgr: f64) -> Result<HeatSource> {
        HeatSource::new(peak_lhgr, self.extrapolation_length)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

/// One operating point of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    /// Peak LHGR q'_0 [W/m].
    pub peak_lhgr: f64,
    /// [MWd/kgU]
    #[serde(default)]
    pub burnup: f64,
    pub split: Split,
}

impl CaseSpec {
    pub fn new(id: impl Into<String>, peak_lhgr: f64, burnup: f64, split: Split) -> Result<Self> {
        let c = Self {
            id: id.into(),
            peak_lhgr,
            burnup,
            split,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
        {
            return Err(RodError::config(format!(
                "case id '{}' must be nonempty [A-Za-z0-9._-]",
                self.id
            )));
        }
        // Zero power is kept as a degenerate check case.
        let q = self.peak_lhgr;
        if !(q == 0.0 || (PEAK_LHGR_MIN..=PEAK_LHGR_MAX).contains(&q)) {
            return Err(RodError::config(format!(
                "case {}: q'_0 = {q} W/m outside [5, 45] kW/m",
                self.id
            )));
        }
        if !(0.0..=BURNUP_MAX).contains(&self.burnup) {
            return Err(RodError::config(format!(
                "case {}: burnup {} outside [0, {BURNUP_MAX}] MWd/kgU",
                self.id, self.burnup
            )));
        }
        Ok(())
    }
}

/// Converged rod field with its coolant state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSolution {
    pub field: TemperatureField,
    pub channel: ChannelState,
    /// Number of rod solves performed.
    pub iterations: usize,
    /// Final max |dT_wall| [K].
    pub residual: f64,
    /// Residual after each rod solve from the second on.
    pub residuals: Vec<f64>,
}

/// Picard loop between the rod conduction and channel solvers.
pub fn couple_rod_channel(case: &CaseSpec, cfg: &PipelineConfig) -> Result<CoupledSolution> {
    case.validate()?;
    cfg.validate()?;
    let mesh = cfg.build_mesh()?;
    let problem = ConductionProblem::new(&mesh, &cfg.materials)?;
    let src = VolumetricSource::from_heat_source(&mesh, &cfg.heat_source(case.peak_lhgr)?)?;
    let z = mesh.clad.z.clone();
    let opts = &cfg.coupling;

    let mut coolant = ChannelState::inlet_guess(&z, &cfg.channel, &cfg.geometry)?;
    let mut guess: Option<Vec<f64>> = None;
    let mut wall_prev: Option<Vec<f64>> = None;
    let mut residuals = Vec::new();

    for it in 1..=opts.max_iterations {
        let out = problem.solve(
            &cfg.materials,
            &src,
            &coolant,
            case.burnup,
            guess.as_deref(),
            &cfg.conduction,
        )?;
        let wall = out.field.clad_outer();
        if let Some(prev) = &wall_prev {
            let res = wall.iter().zip(prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            residuals.push(res);
            if res < opts.tolerance {
                return Ok(CoupledSolution {
                    field: out.field,
                    channel: coolant,
                    iterations: it,
                    residual: res,
                    residuals,
                });
            }
        }
        let flux = wall_heat_flux(&out.field, &coolant)?;
        let fresh = solve_channel(&z, &flux, &cfg.channel, &cfg.geometry)?;
        coolant = relax(&coolant, fresh, opts.relaxation);
        wall_prev = Some(wall);
        guess = Some(out.field.values);
    }
    Err(RodError::NonConvergence {
        solver: "rod-channel coupling",
        residuals,
    })
}

/// Blends the coolant temperature and HTC; the hydraulic fields are taken as solved.
fn relax(old: &ChannelState, mut fresh: ChannelState, w: f64) -> ChannelState {
    for (t, &o) in fresh.t_cool.iter_mut().zip(&old.t_cool) {
        *t = o + w * (*t - o);
    }
    for (h, &o) in fresh.htc.iter_mut().zip(&old.htc) {
        *h = o + w * (*h - o);
    }
    fresh
}
