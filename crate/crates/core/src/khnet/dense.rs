use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use crate::error::{Result, RodError};

/// Fully connected layer `y = W x + b`, `W` stored as (out, in).
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
}

/// tanh hidden layers with a linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStack {
    pub layers: Vec<DenseLayer>,
}

/// Layer inputs kept by the forward pass for back-propagation.
pub struct ForwardCache {
    inputs: Vec<Array2<f64>>,
}

impl DenseStack {
    /// Uniform `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` weights and biases.
    /// `sizes` lists the input width followed by each layer width.
    pub fn init<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let s = 1.0 / (w[0] as f64).sqrt();
                DenseLayer {
                    weights: Array2::from_shape_simple_fn((w[1], w[0]), || rng.gen_range(-s..=s)),
                    biases: Array1::from_shape_simple_fn(w[1], || rng.gen_range(-s..=s)),
                }
            })
            .collect();
        Self { layers }
    }

    pub fn zeros(sizes: &[usize]) -> Self {
        Self {
            layers: sizes
                .windows(2)
                .map(|w| DenseLayer {
                    weights: Array2::zeros((w[1], w[0])),
                    biases: Array1::zeros(w[1]),
                })
                .collect(),
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.sizes())
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.weights.ncols())
    }

    /// Input width followed by each layer's width.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![self.input_dim()];
        s.extend(self.layers.iter().map(|l| l.weights.nrows()));
        s
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(RodError::Structural("stack has no layers".into()));
        }
        for (k, l) in self.layers.iter().enumerate() {
            if l.biases.len() != l.weights.nrows() {
                return Err(RodError::Structural(format!("layer {k}: bias length mismatch")));
            }
            if k > 0 && l.weights.ncols() != self.layers[k - 1].weights.nrows() {
                return Err(RodError::Structural(format!("layer {k}: input width mismatch")));
            }
        }
        if self.params().any(|p| !p.is_finite()) {
            return Err(RodError::Structural("non-finite parameter".into()));
        }
        Ok(())
    }

    /// All parameters, layer by layer, weights (row-major) then biases.
    pub fn params(&self) -> impl Iterator<Item = &f64> + '_ {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.biases.iter()))
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.biases.iter_mut()))
    }

    /// Batched forward pass over the rows of `x`; returns the scalar outputs.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> (Array1<f64>, ForwardCache) {
        let last = self.layers.len() - 1;
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut a = x.to_owned();
        for (k, l) in self.layers.iter().enumerate() {
            let mut z = a.dot(&l.weights.t());
            z += &l.biases;
            inputs.push(a);
            if k < last {
                z.mapv_inplace(f64::tanh);
            }
            a = z;
        }
        (a.index_axis_move(Axis(1), 0), ForwardCache { inputs })
    }

    /// Output-only forward pass.
    pub fn predict_batch(&self, x: ArrayView2<f64>) -> Array1<f64> {
        self.forward_batch(x).0
    }

    /// Parameter gradients given `dy = dL/dy` per row.
    pub fn backward(&self, cache: &ForwardCache, dy: ArrayView1<f64>) -> DenseStack {
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = dy.to_owned().insert_axis(Axis(1));
        for k in (0..self.layers.len()).rev() {
            let a = &cache.inputs[k];
            grads.push(DenseLayer {
                weights: delta.t().dot(a),
                biases: delta.sum_axis(Axis(0)),
            });
            if k > 0 {
                let mut da = delta.dot(&self.layers[k].weights);
                da.zip_mut_with(a, |d, &h| *d *= 1.0 - h * h);
                delta = da;
            }
        }
        grads.reverse();
        DenseStack { layers: grads }
    }
}

/// Single-input forward pass `W3 tanh(W2 tanh(W1 x + b1) + b2) + b3`.
pub fn dense_forward(stack: &DenseStack, features: &[f64]) -> Result<f64> {
    stack.validate()?;
    if features.len() != stack.input_dim() || stack.layers.last().map(|l| l.weights.nrows()) != Some(1) {
        return Err(RodError::Structural(format!(
            "{} features for a stack with input width {} and output width {:?}",
            features.len(),
            stack.input_dim(),
            stack.layers.last().map(|l| l.weights.nrows())
        )));
    }
    let x = ArrayView2::from_shape((1, features.len()), features).expect("contiguous row");
    Ok(stack.predict_batch(x)[0])
}
