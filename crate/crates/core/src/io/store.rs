use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    read_channel_csv, read_field_csv, read_sensors_csv, write_channel_csv, write_field_csv, write_json,
    write_sensors_csv,
};
use crate::coupling::{CaseRecord, CaseSpec, CoupledSolution, Dataset, Normalization, PipelineConfig, Split};
use crate::error::{Result, RodError};

const FORMAT: &str = "rodtwin-dataset";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseEntry {
    pub id: String,
    pub split: Split,
    pub peak_lhgr: f64,
    pub burnup: f64,
    pub iterations: usize,
    pub residual: f64,
    pub residuals: Vec<f64>,
}

/// `manifest.json` at the root of a dataset directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub seed: Option<u64>,
    pub config_hash: String,
    pub config: PipelineConfig,
    pub normalization: Normalization,
    /// Case ids per split, in roster order.
    pub splits: BTreeMap<String, Vec<String>>,
    pub cases: Vec<CaseEntry>,
}

impl Manifest {
    pub fn of(ds: &Dataset) -> Self {
        let splits = Split::ALL
            .iter()
            .map(|s| {
                (
                    s.as_str().to_string(),
                    ds.split(*s).map(|c| c.spec.id.clone()).collect(),
                )
            })
            .collect();
        Self {
            format: FORMAT.into(),
            version: MANIFEST_VERSION,
            seed: ds.seed,
            config_hash: ds.config.hash(),
            config: ds.config.clone(),
            normalization: ds.normalization,
            splits,
            cases: ds
                .cases
                .iter()
                .map(|c| CaseEntry {
                    id: c.spec.id.clone(),
                    split: c.spec.split,
                    peak_lhgr: c.spec.peak_lhgr,
                    burnup: c.spec.burnup,
                    iterations: c.solution.iterations,
                    residual: c.solution.residual,
                    residuals: c.solution.residuals.clone(),
                })
                .collect(),
        }
    }
}

/// Writes `manifest.json` plus `cases/<id>/{field,channel,sensors}.csv`.
pub fn write_dataset(dir: &Path, ds: &Dataset) -> Result<()> {
    ds.validate()?;
    for c in &ds.cases {
        let d = dir.join("cases").join(&c.spec.id);
        std::fs::create_dir_all(&d)?;
        write_field_csv(&d.join("field.csv"), &c.solution.field)?;
        write_channel_csv(&d.join("channel.csv"), &c.solution.channel)?;
        write_sensors_csv(&d.join("sensors.csv"), &c.sensors)?;
    }
    write_json(&dir.join("manifest.json"), &Manifest::of(ds))
}

pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| RodError::config(format!("manifest.json: {e}")))?;
    if m.format != FORMAT || m.version != MANIFEST_VERSION {
        return Err(RodError::config(format!(
            "unsupported dataset {} v{}",
            m.format, m.version
        )));
    }
    if m.config.hash() != m.config_hash {
        return Err(RodError::config("manifest config does not match its config_hash"));
    }
    let geom = m.config.geometry;
    let cases = m
        .cases
        .iter()
        .map(|e| {
            let d = dir.join("cases").join(&e.id);
            Ok(CaseRecord {
                spec: CaseSpec::new(e.id.clone(), e.peak_lhgr, e.burnup, e.split)?,
                solution: CoupledSolution {
                    field: read_field_csv(&d.join("field.csv"), &geom)?,
                    channel: read_channel_csv(&d.join("channel.csv"))?,
                    iterations: e.iterations,
                    residual: e.residual,
                    residuals: e.residuals.clone(),
                },
                sensors: read_sensors_csv(&d.join("sensors.csv"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ds = Dataset {
        config: m.config,
        cases,
        normalization: m.normalization,
        seed: m.seed,
    };
    ds.validate()?;
    Ok(ds)
}
