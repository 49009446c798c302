//! File formats: per-case CSVs, dataset directories and the JSON app config.
//!
//! Floats are written in shortest round-trip form, so every reader returns
//! exactly what its writer was given.

mod config;
mod store;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelState;
use crate::conduction::TemperatureField;
use crate::coupling::SensorSet;
use crate::error::{Result, RodError};
use crate::khnet::TrainHistory;
use crate::model::{Region, RegionGrid, RodGeometry, RodMesh};
use crate::thermomech::StressField;

pub use config::{AppConfig, CaseConfig, RosterConfig, SourceConfig};
pub use store::{read_dataset, write_dataset, CaseEntry, Manifest, MANIFEST_VERSION};

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    if rows.is_empty() {
        return Err(RodError::config(format!("{} has no data rows", path.display())));
    }
    Ok(rows)
}

#[derive(Serialize, Deserialize)]
struct FieldRow {
    r: f64,
    z: f64,
    region: Region,
    temperature: f64,
}

/// `r,z,region,temperature`, one row per node in mesh order.
pub fn write_field_csv(path: &Path, field: &TemperatureField) -> Result<()> {
    write_rows(
        path,
        field.mesh.nodes().zip(&field.values).map(|(n, &t)| FieldRow {
            r: n.r,
            z: n.z,
            region: n.region,
            temperature: t,
        }),
    )
}

fn grid_from_rows(region: Region, rows: &[&FieldRow]) -> Result<RegionGrid> {
    let bad = |msg: &str| RodError::config(format!("{} block of field CSV: {msg}", region.as_str()));
    let first = rows.first().ok_or_else(|| bad("no nodes"))?;
    let nr = rows.iter().position(|p| p.z != first.z).unwrap_or(rows.len());
    if rows.len() % nr != 0 {
        return Err(bad("node count is not a multiple of the radial count"));
    }
    let r: Vec<f64> = rows[..nr].iter().map(|p| p.r).collect();
    let z: Vec<f64> = rows.iter().step_by(nr).map(|p| p.z).collect();
    for (k, p) in rows.iter().enumerate() {
        if p.r != r[k % nr] || p.z != z[k / nr] {
            return Err(bad("nodes are not a tensor grid in radial-fastest order"));
        }
    }
    Ok(RegionGrid { region, r, z })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1e-3)
}

/// Reads a field CSV and rebuilds its mesh; the grid extents must match `geom`.
pub fn read_field_csv(path: &Path, geom: &RodGeometry) -> Result<TemperatureField> {
    let rows: Vec<FieldRow> = read_rows(path)?;
    let split = rows
        .iter()
        .position(|p| p.region == Region::Cladding)
        .unwrap_or(rows.len());
    if rows[split..].iter().any(|p| p.region != Region::Cladding) {
        return Err(RodError::config("field CSV must list fuel nodes before cladding nodes"));
    }
    let fuel: Vec<&FieldRow> = rows[..split].iter().collect();
    let clad: Vec<&FieldRow> = rows[split..].iter().collect();
    let mesh = RodMesh::from_grids(
        geom,
        grid_from_rows(Region::Fuel, &fuel)?,
        grid_from_rows(Region::Cladding, &clad)?,
    )?;
    let (f, c) = (&mesh.fuel, &mesh.clad);
    let extents = [
        (f.r[0], 0.0),
        (*f.r.last().unwrap(), geom.fuel_outer_radius),
        (c.r[0], geom.clad_inner_radius),
        (*c.r.last().unwrap(), geom.clad_outer_radius),
        (f.z[0], geom.fuel_bottom),
        (*f.z.last().unwrap(), geom.fuel_top()),
        (c.z[0], 0.0),
        (*c.z.last().unwrap(), geom.rod_length),
    ];
    if extents.iter().any(|&(a, b)| !close(a, b)) {
        return Err(RodError::config(format!(
            "{}: mesh extents do not match the configured geometry",
            path.display()
        )));
    }
    TemperatureField::new(mesh, rows.iter().map(|p| p.temperature).collect())
}

#[derive(Serialize, Deserialize)]
struct ChannelRow {
    z: f64,
    t_cool: f64,
    htc: f64,
    pressure: f64,
    velocity: f64,
    reynolds: f64,
    prandtl: f64,
}

/// `z,t_cool,htc,pressure,velocity,reynolds,prandtl`.
pub fn write_channel_csv(path: &Path, ch: &ChannelState) -> Result<()> {
    write_rows(
        path,
        (0..ch.len()).map(|k| ChannelRow {
            z: ch.z[k],
            t_cool: ch.t_cool[k],
            htc: ch.htc[k],
            pressure: ch.pressure[k],
            velocity: ch.velocity[k],
            reynolds: ch.reynolds[k],
            prandtl: ch.prandtl[k],
        }),
    )
}

pub fn read_channel_csv(path: &Path) -> Result<ChannelState> {
    let rows: Vec<ChannelRow> = read_rows(path)?;
    Ok(ChannelState {
        z: rows.iter().map(|p| p.z).collect(),
        t_cool: rows.iter().map(|p| p.t_cool).collect(),
        htc: rows.iter().map(|p| p.htc).collect(),
        pressure: rows.iter().map(|p| p.pressure).collect(),
        velocity: rows.iter().map(|p| p.velocity).collect(),
        reynolds: rows.iter().map(|p| p.reynolds).collect(),
        prandtl: rows.iter().map(|p| p.prandtl).collect(),
    })
}

#[derive(Serialize, Deserialize)]
struct SensorRow {
    z: f64,
    radius: f64,
    temperature: f64,
    t_inf: f64,
    dhat: f64,
    weight: f64,
    eta: f64,
}

/// `z,radius,temperature,t_inf,dhat,weight,eta`, one row per sensor.
pub fn write_sensors_csv(path: &Path, s: &SensorSet) -> Result<()> {
    write_rows(
        path,
        (0..s.len()).map(|k| SensorRow {
            z: s.z[k],
            radius: s.radius,
            temperature: s.temperature[k],
            t_inf: s.t_inf[k],
            dhat: s.dhat[k],
            weight: s.weights[k],
            eta: s.eta,
        }),
    )
}

pub fn read_sensors_csv(path: &Path) -> Result<SensorSet> {
    let rows: Vec<SensorRow> = read_rows(path)?;
    let (radius, eta) = (rows[0].radius, rows[0].eta);
    if rows.iter().any(|p| p.radius != radius || p.eta != eta) {
        return Err(RodError::config("sensor CSV mixes radii or eta values"));
    }
    Ok(SensorSet {
        z: rows.iter().map(|p| p.z).collect(),
        radius,
        temperature: rows.iter().map(|p| p.temperature).collect(),
        t_inf: rows.iter().map(|p| p.t_inf).collect(),
        dhat: rows.iter().map(|p| p.dhat).collect(),
        weights: rows.iter().map(|p| p.weight).collect(),
        eta,
    })
}

#[derive(Serialize, Deserialize)]
struct StressRow {
    r: f64,
    z: f64,
    sigma_r: f64,
    sigma_z: f64,
    sigma_theta: f64,
}

/// `r,z,sigma_r,sigma_z,sigma_theta` in Pa, mesh node order.
pub fn write_stress_csv(path: &Path, s: &StressField) -> Result<()> {
    write_rows(
        path,
        (0..s.r.len()).map(|k| StressRow {
            r: s.r[k],
            z: s.z[k],
            sigma_r: s.sigma_r[k],
            sigma_z: s.sigma_z[k],
            sigma_theta: s.sigma_theta[k],
        }),
    )
}

pub fn read_stress_csv(path: &Path) -> Result<StressField> {
    let rows: Vec<StressRow> = read_rows(path)?;
    Ok(StressField {
        r: rows.iter().map(|p| p.r).collect(),
        z: rows.iter().map(|p| p.z).collect(),
        sigma_r: rows.iter().map(|p| p.sigma_r).collect(),
        sigma_z: rows.iter().map(|p| p.sigma_z).collect(),
        sigma_theta: rows.iter().map(|p| p.sigma_theta).collect(),
    })
}

#[derive(Serialize, Deserialize)]
struct HistoryRow {
    epoch: usize,
    train_mse: f64,
    val_mse: f64,
    lr: f64,
}

/// `epoch,train_mse,val_mse,lr`; `val_mse` is `NaN` without a validation split.
pub fn write_history_csv(path: &Path, h: &TrainHistory) -> Result<()> {
    write_rows(
        path,
        (0..h.len()).map(|k| HistoryRow {
            epoch: k,
            train_mse: h.train_mse[k],
            val_mse: h.val_mse[k],
            lr: h.lr[k],
        }),
    )
}

/// Per-epoch columns only; the scalar summary fields come back as defaults.
pub fn read_history_csv(path: &Path) -> Result<TrainHistory> {
    let rows: Vec<HistoryRow> = read_rows(path)?;
    if rows.iter().enumerate().any(|(k, p)| p.epoch != k) {
        return Err(RodError::config("history epochs must run 0, 1, 2, ..."));
    }
    Ok(TrainHistory {
        train_mse: rows.iter().map(|p| p.train_mse).collect(),
        val_mse: rows.iter().map(|p| p.val_mse).collect(),
        lr: rows.iter().map(|p| p.lr).collect(),
        ..Default::default()
    })
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
