use std::time::Instant;

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Batch, Gradients, KhModel, SensorLayout};
use crate::coupling::{CaseRecord, Dataset, Split};
use crate::error::{Result, RodError};

/// Piecewise-constant learning rate: `rates[k]` applies from `breakpoints[k-1]`
/// (or epoch 0) up to `breakpoints[k]`; the last rate holds forever after.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrSchedule {
    pub breakpoints: Vec<usize>,
    pub rates: Vec<f64>,
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self {
            breakpoints: vec![300, 600, 900],
            rates: vec![1e-3, 1e-4, 1e-5, 1e-6],
        }
    }
}

impl LrSchedule {
    pub fn constant(rate: f64) -> Self {
        Self {
            breakpoints: vec![],
            rates: vec![rate],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rates.len() != self.breakpoints.len() + 1 {
            return Err(RodError::config("schedule needs one more rate than breakpoints"));
        }
        if self.breakpoints.windows(2).any(|w| w[1] <= w[0]) || self.breakpoints.first() == Some(&0) {
            return Err(RodError::config(
                "schedule breakpoints must be positive and strictly increasing",
            ));
        }
        if self.rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(RodError::config("learning rates must be finite and > 0"));
        }
        Ok(())
    }

    pub fn rate(&self, epoch: usize) -> f64 {
        self.rates[self.breakpoints.partition_point(|&b| b <= epoch)]
    }
}

/// The staged decay 1e-3 / 1e-4 / 1e-5 / 1e-6 with breaks at 300, 600, 900.
pub fn lr_schedule(epoch: usize) -> f64 {
    LrSchedule::default().rate(epoch)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub schedule: LrSchedule,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    /// Training fails when train MSE exceeds this multiple of its initial value ...
    pub divergence_factor: f64,
    /// ... for this many consecutive epochs.
    pub divergence_patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1100,
            batch_size: 32,
            schedule: LrSchedule::default(),
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
            divergence_factor: 10.0,
            divergence_patience: 50,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.batch_size == 0 {
            return Err(RodError::config("batch size must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || !(self.epsilon > 0.0) {
            return Err(RodError::config("Adam needs beta in [0, 1) and epsilon > 0"));
        }
        Ok(())
    }
}

/// Per-epoch losses in normalized units.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_mse: Vec<f64>,
    /// NaN when the dataset has no validation cases.
    pub val_mse: Vec<f64>,
    pub lr: Vec<f64>,
    /// Train MSE of the initialized model.
    pub initial_train_mse: f64,
    /// Epoch whose parameters were kept.
    pub best_epoch: usize,
    pub wall_time_s: f64,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.train_mse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_mse.is_empty()
    }
}

/// Adam moments over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamState {
    pub fn new(n_params: usize, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Self {
            beta1,
            beta2,
            epsilon,
            t: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One bias-corrected update of `params` along `grads`.
    pub fn step<'a, 'b>(
        &mut self,
        params: impl Iterator<Item = &'a mut f64>,
        grads: impl Iterator<Item = &'b f64>,
        lr: f64,
    ) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powf(self.t as f64);
        let c2 = 1.0 - self.beta2.powf(self.t as f64);
        let (b1, b2, eps) = (self.beta1, self.beta2, self.epsilon);
        for (((p, &g), m), v) in params.zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        }
    }
}

/// Adam update of both stacks of `model`.
pub fn adam_step(model: &mut KhModel, state: &mut AdamState, grads: &Gradients, lr: f64) -> Result<()> {
    let n = model.g.param_count() + model.dg.param_count();
    if state.len() != n || grads.g.param_count() + grads.dg.param_count() != n {
        return Err(RodError::Structural(format!(
            "optimizer holds {} moments for {n} parameters",
            state.len()
        )));
    }
    let params = model.g.params_mut().chain(model.dg.params_mut());
    let g = grads.g.params().chain(grads.dg.params());
    state.step(params, g, lr);
    Ok(())
}

/// Network-unit view of one case.
struct CaseData {
    u: Vec<f64>,
    dhat: Vec<f64>,
    targets: Vec<f64>,
}

/// Training tensors shared by every epoch.
struct TrainingSet {
    features: Array2<f64>,
    train: Vec<CaseData>,
    val: Vec<CaseData>,
}

fn case_data(model: &KhModel, c: &CaseRecord) -> Result<CaseData> {
    let (u, dhat) = model.sensor_inputs(&c.sensors)?;
    let n = &model.normalization;
    Ok(CaseData {
        u,
        dhat,
        targets: c.solution.field.values.iter().map(|&t| n.temperature(t)).collect(),
    })
}

fn prepare(model: &KhModel, ds: &Dataset) -> Result<TrainingSet> {
    let first = ds
        .split(Split::Train)
        .next()
        .ok_or_else(|| RodError::Training("dataset has no training cases".into()))?;
    let mesh = &first.solution.field.mesh;
    for c in &ds.cases {
        if &c.solution.field.mesh != mesh {
            return Err(RodError::Structural(format!(
                "case {} uses a different mesh",
                c.spec.id
            )));
        }
    }
    let points: Vec<(f64, f64)> = mesh.nodes().map(|n| (n.r, n.z)).collect();
    let load = |s| ds.split(s).map(|c| case_data(model, c)).collect::<Result<Vec<_>>>();
    Ok(TrainingSet {
        features: model.features(&points),
        train: load(Split::Train)?,
        val: load(Split::Validate)?,
    })
}

/// Mean squared error over every node of every case, from one stack evaluation.
fn split_mse(model: &KhModel, x: &Array2<f64>, cases: &[CaseData]) -> f64 {
    if cases.is_empty() {
        return f64::NAN;
    }
    let g = model.g.predict_batch(x.view());
    let dg = model.dg.predict_batch(x.view());
    let (mut sse, mut n) = (0.0, 0usize);
    for c in cases {
        let pred = model.combine(&g, &dg, &c.u, &c.dhat);
        sse += pred.iter().zip(&c.targets).map(|(p, t)| (p - t) * (p - t)).sum::<f64>();
        n += pred.len();
    }
    sse / n as f64
}

fn make_batch(set: &TrainingSet, samples: &[(usize, usize)], j: usize) -> Batch {
    let b = samples.len();
    let mut features = Array2::zeros((b * j, set.features.ncols()));
    let mut u = Array2::zeros((b, j));
    let mut dhat = Array2::zeros((b, j));
    let mut targets = Array1::zeros(b);
    for (s, &(c, node)) in samples.iter().enumerate() {
        let case = &set.train[c];
        for k in 0..j {
            features.row_mut(s * j + k).assign(&set.features.row(node * j + k));
            u[[s, k]] = case.u[k];
            dhat[[s, k]] = case.dhat[k];
        }
        targets[s] = case.targets[node];
    }
    Batch {
        features,
        u,
        dhat,
        targets,
    }
}

/// Mini-batch Adam over all (training case, mesh node) samples. Keeps the
/// parameters of the epoch with the lowest validation MSE (train MSE when
/// there is no validation split).
pub fn train(ds: &Dataset, cfg: &TrainConfig) -> Result<(KhModel, TrainHistory)> {
    cfg.validate()?;
    let start = Instant::now();
    let first = ds
        .split(Split::Train)
        .next()
        .ok_or_else(|| RodError::Training("dataset has no training cases".into()))?;
    let layout = SensorLayout::of(&first.sensors, ds.config.sensors.t_inf);
    let mut model = KhModel::new(ds.normalization, layout, cfg.seed)?;
    let set = prepare(&model, ds)?;
    let j = model.sensors.len();
    let n_nodes = set.features.nrows() / j;

    let mut samples: Vec<(usize, usize)> = (0..set.train.len())
        .flat_map(|c| (0..n_nodes).map(move |k| (c, k)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let n_params = model.g.param_count() + model.dg.param_count();
    let mut adam = AdamState::new(n_params, cfg.beta1, cfg.beta2, cfg.epsilon);

    let mut hist = TrainHistory {
        initial_train_mse: split_mse(&model, &set.features, &set.train),
        ..Default::default()
    };
    let mut best = (f64::INFINITY, model.clone());
    let mut over = 0usize;
    let mut batch_id = 0usize;

    for epoch in 0..cfg.epochs {
        let lr = cfg.schedule.rate(epoch);
        samples.shuffle(&mut rng);
        for chunk in samples.chunks(cfg.batch_size) {
            let batch = make_batch(&set, chunk, j);
            let (_, grads) = model.gradients(&batch, batch_id)?;
            adam_step(&mut model, &mut adam, &grads, lr)?;
            batch_id += 1;
        }
        let tr = split_mse(&model, &set.features, &set.train);
        let va = split_mse(&model, &set.features, &set.val);
        if !tr.is_finite() {
            return Err(RodError::Training(format!("train MSE became {tr} at epoch {epoch}")));
        }
        hist.train_mse.push(tr);
        hist.val_mse.push(va);
        hist.lr.push(lr);

        let score = if va.is_nan() { tr } else { va };
        if score < best.0 {
            best = (score, model.clone());
            hist.best_epoch = epoch;
        }
        over = if tr > cfg.divergence_factor * hist.initial_train_mse {
            over + 1
        } else {
            0
        };
        if over >= cfg.divergence_patience {
            return Err(RodError::Training(format!(
                "diverged: train MSE above {}x initial for {over} epochs (epoch {epoch})",
                cfg.divergence_factor
            )));
        }
        if epoch % 50 == 0 || epoch + 1 == cfg.epochs {
            log::info!("epoch {epoch}: lr {lr:.1e} train {tr:.4e} val {va:.4e}");
        }
    }
    hist.wall_time_s = start.elapsed().as_secs_f64();
    Ok((if cfg.epochs == 0 { model } else { best.1 }, hist))
}
