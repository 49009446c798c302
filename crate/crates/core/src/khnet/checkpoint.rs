use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{layer_sizes, DenseLayer, DenseStack, KhModel, SensorLayout, FEATURE_NAMES};
use crate::coupling::Normalization;
use crate::error::{Result, RodError};

const FORMAT: &str = "rodtwin-khnet";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub rows: usize,
    pub cols: usize,
    /// Row-major (out, in).
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Architecture {
    pub features: Vec<String>,
    /// Input width followed by each layer width.
    pub layer_sizes: Vec<usize>,
    pub activation: String,
    pub output_activation: String,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            features: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            layer_sizes: layer_sizes().to_vec(),
            activation: "tanh".into(),
            output_activation: "linear".into(),
        }
    }
}

/// On-disk model: metadata plus both stacks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub architecture: Architecture,
    pub normalization: Normalization,
    pub sensors: SensorLayout,
    pub g_stack: Vec<LayerRecord>,
    pub dg_stack: Vec<LayerRecord>,
}

fn records(s: &DenseStack) -> Vec<LayerRecord> {
    s.layers
        .iter()
        .map(|l| LayerRecord {
            rows: l.weights.nrows(),
            cols: l.weights.ncols(),
            weights: l.weights.iter().copied().collect(),
            biases: l.biases.to_vec(),
        })
        .collect()
}

fn stack(recs: &[LayerRecord]) -> Result<DenseStack> {
    let layers = recs
        .iter()
        .map(|r| {
            let weights = Array2::from_shape_vec((r.rows, r.cols), r.weights.clone())
                .map_err(|e| RodError::Structural(format!("layer weights: {e}")))?;
            Ok(DenseLayer {
                weights,
                biases: Array1::from(r.biases.clone()),
            })
        })
        .collect::<Result<_>>()?;
    Ok(DenseStack { layers })
}

impl KhModel {
    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            architecture: Architecture::default(),
            normalization: self.normalization,
            sensors: self.sensors.clone(),
            g_stack: records(&self.g),
            dg_stack: records(&self.dg),
        }
    }

    pub fn from_checkpoint(c: &Checkpoint) -> Result<Self> {
        if c.format != FORMAT || c.version != VERSION {
            return Err(RodError::config(format!(
                "unsupported checkpoint {} v{}",
                c.format, c.version
            )));
        }
        if c.architecture != Architecture::default() {
            return Err(RodError::Structural(format!(
                "checkpoint architecture {:?} differs from {:?}",
                c.architecture.layer_sizes,
                layer_sizes()
            )));
        }
        let m = Self {
            g: stack(&c.g_stack)?,
            dg: stack(&c.dg_stack)?,
            normalization: c.normalization,
            sensors: c.sensors.clone(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_checkpoint())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_checkpoint(&serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
