use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conduction::ConductionOptions;
use crate::coupling::{reference_roster, CaseSpec, CouplingOptions, PipelineConfig, SensorConfig, Split, SweepConfig};
use crate::error::{Result, RodError};
use crate::khnet::TrainConfig;
use crate::model::{ChannelBoundary, HeatSource, MaterialParams, MeshResolution, RodGeometry};
use crate::thermomech::ThermomechConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceConfig {
    /// [m]
    pub extrapolation_length: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            extrapolation_length: HeatSource::default().extrapolation_length,
        }
    }
}

/// The single operating point used by `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseConfig {
    pub id: String,
    /// [W/m]
    pub peak_lhgr: f64,
    /// [MWd/kgU]
    pub burnup: f64,
}

impl Default for CaseConfig {
    fn default() -> Self {
        Self {
            id: "case".into(),
            peak_lhgr: 20_000.0,
            burnup: 0.0,
        }
    }
}

impl CaseConfig {
    pub fn spec(&self) -> Result<CaseSpec> {
        CaseSpec::new(self.id.clone(), self.peak_lhgr, self.burnup, Split::Test)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RosterConfig {
    /// Drop the validation copy of the 16 kW/m case.
    pub exclude_duplicate_validation: bool,
    /// Explicit roster; the published one when absent.
    pub cases: Option<Vec<CaseSpec>>,
}

impl RosterConfig {
    pub fn specs(&self) -> Vec<CaseSpec> {
        match &self.cases {
            Some(c) => c.clone(),
            None => reference_roster(self.exclude_duplicate_validation),
        }
    }
}

/// Top-level JSON config shared by every subcommand. Absent sections take
/// their defaults; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub geometry: RodGeometry,
    pub materials: MaterialParams,
    pub channel: ChannelBoundary,
    pub source: SourceConfig,
    pub mesh: MeshResolution,
    pub conduction: ConductionOptions,
    pub coupling: CouplingOptions,
    pub sensors: SensorConfig,
    pub case: CaseConfig,
    pub roster: RosterConfig,
    pub training: TrainConfig,
    pub sweep: SweepConfig,
    pub thermomech: ThermomechConfig,
}

impl AppConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| RodError::config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)?;
        Self::from_json(&s).map_err(|e| match e {
            RodError::Config(m) => RodError::config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline().validate()?;
        self.training.validate()?;
        self.thermomech.validate()
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            geometry: self.geometry,
            materials: self.materials,
            channel: self.channel,
            extrapolation_length: self.source.extrapolation_length,
            mesh: self.mesh,
            conduction: self.conduction,
            coupling: self.coupling,
            sensors: self.sensors.clone(),
        }
    }
}
