//! Shared fixtures for the criterion benches.

use ndarray::{Array1, Array2};
use rodtwin_core::coupling::{generate_dataset, CaseSpec, Dataset, PipelineConfig, Split};
use rodtwin_core::khnet::{Batch, KhModel, SensorLayout};

pub fn case(q: f64) -> CaseSpec {
    CaseSpec::new("bench", q, 0.0, Split::Test).unwrap()
}

/// Two-case dataset on the default mesh.
pub fn dataset() -> Dataset {
    let specs = [
        CaseSpec::new("train", 16_000.0, 0.0, Split::Train).unwrap(),
        case(20_000.0),
    ];
    generate_dataset(&specs, &PipelineConfig::default()).unwrap()
}

pub fn model(ds: &Dataset) -> KhModel {
    let c = &ds.cases[0];
    let layout = SensorLayout::of(&c.sensors, ds.config.sensors.t_inf);
    KhModel::new(ds.normalization, layout, 0).unwrap()
}

/// The first `b` nodes of the training case as one mini-batch.
pub fn batch(m: &KhModel, ds: &Dataset, b: usize) -> Batch {
    let c = &ds.cases[0];
    let pts: Vec<(f64, f64)> = c.solution.field.mesh.nodes().take(b).map(|n| (n.r, n.z)).collect();
    let (u, d) = m.sensor_inputs(&c.sensors).unwrap();
    let j = u.len();
    let n = &ds.normalization;
    Batch {
        features: m.features(&pts),
        u: Array2::from_shape_fn((b, j), |(_, k)| u[k]),
        dhat: Array2::from_shape_fn((b, j), |(_, k)| d[k]),
        targets: Array1::from_iter(c.solution.field.values[..b].iter().map(|&t| n.temperature(t))),
    }
}
