//! Dense feed-forward networks with cached forward passes and exact
//! reverse-mode gradients.
//!
//! Weights are stored `inputs x outputs`, so a batch `X` (one row per
//! sample) maps to `act(X W + b)`. Flat parameter order is, per layer,
//! the weights in row-major order followed by the bias.

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Linear,
}

impl Activation {
    fn apply(self, z: &Array2<f64>) -> Array2<f64> {
        match self {
            Activation::Relu => z.mapv(|v| v.max(0.0)),
            Activation::Tanh => z.mapv(f64::tanh),
            Activation::Linear => z.clone(),
        }
    }

    /// Multiply `grad` in place by the activation derivative. ReLU uses
    /// subgradient 0 at a zero pre-activation.
    fn backprop(self, grad: &mut Array2<f64>, pre: &Array2<f64>, out: &Array2<f64>) {
        match self {
            Activation::Relu => grad.zip_mut_with(pre, |g, &z| {
                if z <= 0.0 {
                    *g = 0.0
                }
            }),
            Activation::Tanh => grad.zip_mut_with(out, |g, &a| *g *= 1.0 - a * a),
            Activation::Linear => {}
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::Tanh => 1,
            Activation::Linear => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Relu),
            1 => Some(Activation::Tanh),
            2 => Some(Activation::Linear),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn zeros(inputs: usize, outputs: usize, activation: Activation) -> Self {
        Self { weights: Array2::zeros((inputs, outputs)), bias: Array1::zeros(outputs), activation }
    }

    /// Uniform(-s/sqrt(fan_in), s/sqrt(fan_in)) on weights and biases.
    pub fn uniform<R: Rng + ?Sized>(
        inputs: usize,
        outputs: usize,
        activation: Activation,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let bound = scale / (inputs as f64).sqrt();
        let mut draw = || if bound > 0.0 { rng.random_range(-bound..bound) } else { 0.0 };
        let weights = Array2::from_shape_simple_fn((inputs, outputs), &mut draw);
        let bias = Array1::from_shape_simple_fn(outputs, &mut draw);
        Self { weights, bias, activation }
    }

    pub fn inputs(&self) -> usize {
        self.weights.nrows()
    }

    pub fn outputs(&self) -> usize {
        self.weights.ncols()
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
    pub output: Array2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<Layer>,
}

impl Mlp {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("network needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].outputs() != pair[1].inputs() {
                return Err(Error::InvalidConfig(format!(
                    "layer widths {} -> {} do not chain",
                    pair[0].outputs(),
                    pair[1].inputs()
                )));
            }
        }
        for l in &layers {
            if l.bias.len() != l.outputs() {
                return Err(Error::InvalidConfig("bias width mismatch".into()));
            }
        }
        Ok(Self { layers })
    }

    /// Randomly initialised network with the given widths
    /// (`widths.len() == activations.len() + 1`).
    pub fn uniform<R: Rng + ?Sized>(widths: &[usize], activations: &[Activation], rng: &mut R) -> Self {
        assert_eq!(widths.len(), activations.len() + 1);
        let layers = widths
            .windows(2)
            .zip(activations)
            .map(|(w, &a)| Layer::uniform(w[0], w[1], a, 1.0, rng))
            .collect();
        Self { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_width(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::num_params).sum()
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut a = x.clone();
        for l in &self.layers {
            let z = a.dot(&l.weights) + &l.bias;
            a = l.activation.apply(&z);
        }
        a
    }

    pub fn forward_cached(&self, x: &Array2<f64>) -> ForwardCache {
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut a = x.clone();
        for l in &self.layers {
            let z = a.dot(&l.weights) + &l.bias;
            let next = l.activation.apply(&z);
            inputs.push(a);
            pre.push(z);
            a = next;
        }
        ForwardCache { inputs, pre, output: a }
    }

    /// Gradients of `sum(upstream * output)` with respect to the flat
    /// parameters and to the network input.
    pub fn backward(&self, cache: &ForwardCache, upstream: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
        let n = self.layers.len();
        let mut per_layer: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut grad = upstream.clone();
        for i in (0..n).rev() {
            let l = &self.layers[i];
            let out = if i + 1 < n { &cache.inputs[i + 1] } else { &cache.output };
            l.activation.backprop(&mut grad, &cache.pre[i], out);
            let dw = cache.inputs[i].t().dot(&grad);
            let db = grad.sum_axis(Axis(0));
            let mut flat = Vec::with_capacity(l.num_params());
            flat.extend(dw.iter());
            flat.extend(db.iter());
            per_layer[i] = flat;
            grad = grad.dot(&l.weights.t());
        }
        (per_layer.concat(), grad)
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers.iter_mut().flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|p| p.is_finite())
    }

    /// `self <- tau * online + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, online: &Mlp, tau: f64) {
        for (t, &o) in self.params_mut().zip(online.params()) {
            *t = tau * o + (1.0 - tau) * *t;
        }
    }
}
