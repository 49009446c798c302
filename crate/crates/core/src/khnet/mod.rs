//! Boundary-integral field reconstruction network.
//!
//! An interior temperature is written as a boundary sum over the sensors,
//! `T(x) = sum_j w_j (u_j dG(x, x_j) - G(x, x_j) dhat_j)`, where `u_j` is the
//! sensor temperature, `dhat_j` a Newton-cooling surrogate of its normal
//! derivative, and `G`, `dG` are two dense tanh stacks (5 -> 128 -> 64 -> 1)
//! fed with geometric features of the pair `(x, x_j)`. The weights `w_j` are
//! fixed boundary segment lengths. All temperatures inside the network are
//! min-max normalized with constants fitted on the training cases.

mod checkpoint;
mod dense;
mod train;

pub use checkpoint::{Checkpoint, LayerRecord};
pub use dense::{dense_forward, DenseLayer, DenseStack, ForwardCache};
pub use train::{adam_step, lr_schedule, train, AdamState, LrSchedule, TrainConfig, TrainHistory};

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conduction::TemperatureField;
use crate::coupling::{Normalization, SensorSet, TInfPolicy};
use crate::error::{Result, RodError};
use crate::model::RodMesh;

pub const FEATURE_NAMES: [&str; 5] = ["r", "z", "z_j", "dz", "rho"];
pub const N_FEATURES: usize = 5;
pub const HIDDEN: [usize; 2] = [128, 64];
/// Radial stretch applied before measuring distances, so the thin rod is not
/// dominated by its length.
pub const RADIAL_SCALE: f64 = 100.0;

pub fn layer_sizes() -> [usize; 4] {
    [N_FEATURES, HIDDEN[0], HIDDEN[1], 1]
}

/// Raw geometric relation between an interior point and a sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFeatures {
    pub r: f64,
    pub z: f64,
    pub z_j: f64,
    /// `z - z_j` [m]
    pub dz: f64,
    /// Distance in the `(100 r, z)` frame [m].
    pub rho: f64,
}

impl BoundaryFeatures {
    pub fn new(r: f64, z: f64, sensor_r: f64, z_j: f64) -> Self {
        let dz = z - z_j;
        Self {
            r,
            z,
            z_j,
            dz,
            rho: (RADIAL_SCALE * (r - sensor_r)).hypot(dz),
        }
    }

    /// Coordinates to [-1, 1]; `dz` divided by the axial extent; `rho` mapped
    /// from `[0, rho_ref]` with `rho_ref` the scaled diagonal of the domain.
    pub fn normalized(&self, n: &Normalization) -> [f64; N_FEATURES] {
        let dz_ref = n.z_max - n.z_min;
        let rho_ref = (RADIAL_SCALE * (n.r_max - n.r_min)).hypot(dz_ref);
        [
            n.r(self.r),
            n.z(self.z),
            n.z(self.z_j),
            self.dz / dz_ref,
            2.0 * self.rho / rho_ref - 1.0,
        ]
    }
}

pub fn boundary_features(r: f64, z: f64, sensor_r: f64, z_j: f64, n: &Normalization) -> [f64; N_FEATURES] {
    BoundaryFeatures::new(r, z, sensor_r, z_j).normalized(n)
}

/// Integrand `u_j dG_ij - G_ij dhat_j`.
#[inline]
pub fn kh_physical_layer(u: f64, dhat: f64, g: f64, dg: f64) -> f64 {
    u * dg - g * dhat
}

/// Weighted boundary sum `sum_j w_j phi_j`.
#[inline]
pub fn kh_integrate(phi: &[f64], weights: &[f64]) -> f64 {
    phi.iter().zip(weights).map(|(p, w)| p * w).sum()
}

/// Mean squared error.
pub fn mse_loss(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(RodError::domain(format!(
            "mse needs equal nonempty inputs (got {} and {})",
            pred.len(),
            truth.len()
        )));
    }
    Ok(pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / pred.len() as f64)
}

/// Sensor layout a model was trained for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorLayout {
    pub z: Vec<f64>,
    pub radius: f64,
    pub weights: Vec<f64>,
    pub eta: f64,
    pub t_inf: TInfPolicy,
}

impl SensorLayout {
    pub fn of(s: &SensorSet, t_inf: TInfPolicy) -> Self {
        Self {
            z: s.z.clone(),
            radius: s.radius,
            weights: s.weights.clone(),
            eta: s.eta,
            t_inf,
        }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    fn check(&self, s: &SensorSet) -> Result<()> {
        let close = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + y.abs()))
        };
        if !close(&self.z, &s.z)
            || !close(&self.weights, &s.weights)
            || !close(&[self.radius, self.eta], &[s.radius, s.eta])
        {
            return Err(RodError::config(
                "sensor layout (positions, weights, radius or eta) differs from the model's",
            ));
        }
        Ok(())
    }
}

/// One mini-batch in network units.
#[derive(Debug, Clone)]
pub struct Batch {
    /// (B * J, 5) features, sample-major.
    pub features: Array2<f64>,
    /// (B, J) normalized sensor temperatures.
    pub u: Array2<f64>,
    /// (B, J) normalized derivative surrogates.
    pub dhat: Array2<f64>,
    /// (B) normalized true temperatures.
    pub targets: Array1<f64>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Gradients of both stacks.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub g: DenseStack,
    pub dg: DenseStack,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KhModel {
    pub g: DenseStack,
    pub dg: DenseStack,
    pub normalization: Normalization,
    pub sensors: SensorLayout,
}

impl KhModel {
    /// Freshly initialized stacks, seeded.
    pub fn new(normalization: Normalization, sensors: SensorLayout, seed: u64) -> Result<Self> {
        normalization.validate()?;
        if sensors.len() < 2 || sensors.weights.len() != sensors.len() {
            return Err(RodError::config("model needs >= 2 sensors with one weight each"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DenseStack::init(&layer_sizes(), &mut rng);
        let dg = DenseStack::init(&layer_sizes(), &mut rng);
        Ok(Self {
            g,
            dg,
            normalization,
            sensors,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for s in [&self.g, &self.dg] {
            s.validate()?;
            if s.sizes() != layer_sizes() {
                return Err(RodError::Structural(format!(
                    "stack sizes {:?}, expected {:?}",
                    s.sizes(),
                    layer_sizes()
                )));
            }
        }
        self.normalization.validate()
    }

    /// Feature rows for `points` x sensors, point-major.
    pub fn features(&self, points: &[(f64, f64)]) -> Array2<f64> {
        let j = self.sensors.len();
        let mut x = Array2::zeros((points.len() * j, N_FEATURES));
        for (p, &(r, z)) in points.iter().enumerate() {
            for (k, &zj) in self.sensors.z.iter().enumerate() {
                let f = boundary_features(r, z, self.sensors.radius, zj, &self.normalization);
                x.row_mut(p * j + k).assign(&ndarray::ArrayView1::from(&f));
            }
        }
        x
    }

    /// Normalized `(u, dhat)` for a sensor set matching this model's layout.
    pub fn sensor_inputs(&self, s: &SensorSet) -> Result<(Vec<f64>, Vec<f64>)> {
        self.sensors.check(s)?;
        let n = &self.normalization;
        let u = s.temperature.iter().map(|&t| n.temperature(t)).collect();
        let d = s.dhat.iter().map(|&d| d * n.temperature_scale()).collect();
        Ok((u, d))
    }

    /// Boundary sum for every point given precomputed stack outputs.
    pub fn combine(&self, g: &Array1<f64>, dg: &Array1<f64>, u: &[f64], dhat: &[f64]) -> Vec<f64> {
        let j = self.sensors.len();
        let mut phi = vec![0.0; j];
        (0..g.len() / j)
            .map(|p| {
                for k in 0..j {
                    phi[k] = kh_physical_layer(u[k], dhat[k], g[p * j + k], dg[p * j + k]);
                }
                kh_integrate(&phi, &self.sensors.weights)
            })
            .collect()
    }

    /// Normalized predictions at `points`.
    pub fn predict_normalized(&self, points: &[(f64, f64)], u: &[f64], dhat: &[f64]) -> Vec<f64> {
        let x = self.features(points);
        let g = self.g.predict_batch(x.view());
        let dg = self.dg.predict_batch(x.view());
        self.combine(&g, &dg, u, dhat)
    }

    /// Temperatures [K] at `points` from a sensor set.
    pub fn predict(&self, sensors: &SensorSet, points: &[(f64, f64)]) -> Result<Vec<f64>> {
        let (u, d) = self.sensor_inputs(sensors)?;
        Ok(self
            .predict_normalized(points, &u, &d)
            .into_iter()
            .map(|v| self.normalization.temperature_inv(v))
            .collect())
    }

    /// Loss and exact gradients of the batch MSE with respect to both stacks.
    pub fn gradients(&self, batch: &Batch, batch_id: usize) -> Result<(f64, Gradients)> {
        let b = batch.len();
        let j = self.sensors.len();
        if b == 0 || batch.features.nrows() != b * j || batch.u.dim() != (b, j) || batch.dhat.dim() != (b, j) {
            return Err(RodError::Structural("batch shapes inconsistent".into()));
        }
        let (g, gc) = self.g.forward_batch(batch.features.view());
        let (dg, dgc) = self.dg.forward_batch(batch.features.view());
        let w = &self.sensors.weights;
        let mut loss = 0.0;
        let mut dl_g = Array1::zeros(b * j);
        let mut dl_dg = Array1::zeros(b * j);
        let mut phi = vec![0.0; j];
        for s in 0..b {
            for k in 0..j {
                phi[k] = kh_physical_layer(batch.u[[s, k]], batch.dhat[[s, k]], g[s * j + k], dg[s * j + k]);
            }
            let e = kh_integrate(&phi, w) - batch.targets[s];
            loss += e * e;
            let de = 2.0 * e / b as f64;
            for k in 0..j {
                dl_g[s * j + k] = -de * w[k] * batch.dhat[[s, k]];
                dl_dg[s * j + k] = de * w[k] * batch.u[[s, k]];
            }
        }
        let grads = Gradients {
            g: self.g.backward(&gc, dl_g.view()),
            dg: self.dg.backward(&dgc, dl_dg.view()),
        };
        if grads.g.params().chain(grads.dg.params()).any(|v| !v.is_finite()) {
            return Err(RodError::NonFiniteGradient { batch: batch_id });
        }
        Ok((loss / b as f64, grads))
    }
}

/// Evaluates the model at every node of `mesh` and returns Kelvin temperatures.
pub fn reconstruct_field(model: &KhModel, sensors: &SensorSet, mesh: &RodMesh) -> Result<TemperatureField> {
    let points: Vec<(f64, f64)> = mesh.nodes().map(|n| (n.r, n.z)).collect();
    let values = model.predict(sensors, &points)?;
    TemperatureField::new(mesh.clone(), values)
}
