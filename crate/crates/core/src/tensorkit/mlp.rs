//! Explicit forward/backward multilayer perceptron.
//!
//! Layers are dense `x·W + b` with tanh on hidden layers and an identity
//! output layer. The forward pass returns a cache of per-layer activations;
//! the backward pass consumes it and produces gradients shaped exactly like
//! the parameters.

use crate::tensorkit::{Mat, RngStream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub w: Mat,
    pub b: Vec<f64>,
    pub act: Activation,
}

impl DenseLayer {
    pub fn in_dim(&self) -> usize {
        self.w.rows()
    }

    pub fn out_dim(&self) -> usize {
        self.w.cols()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<DenseLayer>,
}

impl MlpParams {
    /// Random init: `W ~ N(0, 1/in_dim)`, `b = 0`; tanh hidden, identity output.
    pub fn init(dims: &[usize], rng: &mut RngStream) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for l in 0..dims.len() - 1 {
            let (fan_in, fan_out) = (dims[l], dims[l + 1]);
            let scale = 1.0 / (fan_in as f64).sqrt();
            let data: Vec<f64> = rng.gauss(fan_in * fan_out).iter().map(|g| g * scale).collect();
            layers.push(DenseLayer {
                w: Mat::from_vec(fan_in, fan_out, data).unwrap(),
                b: vec![0.0; fan_out],
                act: if l + 1 == dims.len() - 1 {
                    Activation::Identity
                } else {
                    Activation::Tanh
                },
            });
        }
        MlpParams { layers }
    }

    pub fn zeros(dims: &[usize]) -> Self {
        assert!(dims.len() >= 2);
        let layers = (0..dims.len() - 1)
            .map(|l| DenseLayer {
                w: Mat::zeros(dims[l], dims[l + 1]),
                b: vec![0.0; dims[l + 1]],
                act: if l + 1 == dims.len() - 1 {
                    Activation::Identity
                } else {
                    Activation::Tanh
                },
            })
            .collect();
        MlpParams { layers }
    }

    pub fn zeros_like(&self) -> Self {
        MlpParams {
            layers: self
                .layers
                .iter()
                .map(|l| DenseLayer {
                    w: Mat::zeros(l.in_dim(), l.out_dim()),
                    b: vec![0.0; l.out_dim()],
                    act: l.act,
                })
                .collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.in_dim())
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.out_dim())
    }

    /// Checks that adjacent layer dimensions chain and all values are finite.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Shape("empty network".into()));
        }
        for (l, pair) in self.layers.windows(2).enumerate() {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::Shape(format!(
                    "layer {l} out {} does not chain into layer {} in {}",
                    pair[0].out_dim(),
                    l + 1,
                    pair[1].in_dim()
                )));
            }
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.b.len() != layer.out_dim() {
                return Err(Error::Shape(format!("layer {l} bias length mismatch")));
            }
            if !layer.w.is_finite() || !layer.b.iter().all(|v| v.is_finite()) {
                return Err(Error::Numeric(format!("layer {l} has non-finite values")));
            }
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.in_dim() * l.out_dim() + l.out_dim())
            .sum()
    }

    /// All parameters in declaration order: per layer, row-major weights then biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(l.w.as_slice());
            out.extend_from_slice(&l.b);
        }
        out
    }

    pub fn from_flat(&self, flat: &[f64]) -> Result<Self> {
        if flat.len() != self.param_count() {
            return Err(Error::Shape(format!(
                "flat vector has {} values, params need {}",
                flat.len(),
                self.param_count()
            )));
        }
        let mut out = self.zeros_like();
        let mut pos = 0;
        for l in &mut out.layers {
            let nw = l.in_dim() * l.out_dim();
            l.w = Mat::from_vec(l.in_dim(), l.out_dim(), flat[pos..pos + nw].to_vec())?;
            pos += nw;
            let nb = l.b.len();
            l.b.copy_from_slice(&flat[pos..pos + nb]);
            pos += nb;
        }
        Ok(out)
    }

    /// `self += a · other`, shapes must match.
    pub fn scaled_add(&mut self, a: f64, other: &MlpParams) {
        assert_eq!(self.layers.len(), other.layers.len());
        for (l, o) in self.layers.iter_mut().zip(other.layers.iter()) {
            for (x, &y) in l.w.as_mut_slice().iter_mut().zip(o.w.as_slice()) {
                *x += a * y;
            }
            for (x, &y) in l.b.iter_mut().zip(o.b.iter()) {
                *x += a * y;
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.flatten().iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Per-layer activations from a forward pass: `[input, a_1, …, a_L]`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub activations: Vec<Mat>,
}

impl ForwardCache {
    pub fn output(&self) -> &Mat {
        self.activations.last().expect("cache holds at least the input")
    }
}

/// Forward pass over a batch (rows of `x`). Returns the output and a cache
/// sufficient for [`mlp_backward`].
pub fn mlp_forward(params: &MlpParams, x: &Mat) -> Result<(Mat, ForwardCache)> {
    if x.cols() != params.input_dim() {
        return Err(Error::Shape(format!(
            "input width {} != first layer width {}",
            x.cols(),
            params.input_dim()
        )));
    }
    let mut activations = Vec::with_capacity(params.layers.len() + 1);
    activations.push(x.clone());
    for layer in &params.layers {
        let mut z = activations.last().unwrap().matmul(&layer.w)?;
        z.add_row_vector(&layer.b);
        let a = match layer.act {
            Activation::Tanh => z.map(f64::tanh),
            Activation::Identity => z,
        };
        activations.push(a);
    }
    let y = activations.last().unwrap().clone();
    Ok((y, ForwardCache { activations }))
}

/// Backward pass. `d_out` is the loss gradient at the network output; returns
/// parameter gradients (same shapes as `params`) and the gradient at the input.
pub fn mlp_backward(
    params: &MlpParams,
    cache: &ForwardCache,
    d_out: &Mat,
) -> Result<(MlpParams, Mat)> {
    if cache.activations.len() != params.layers.len() + 1 {
        return Err(Error::Shape(format!(
            "cache holds {} activations, expected {}",
            cache.activations.len(),
            params.layers.len() + 1
        )));
    }
    let out = cache.output();
    if d_out.rows() != out.rows() || d_out.cols() != out.cols() {
        return Err(Error::Shape(format!(
            "d_out {}x{} does not match output {}x{}",
            d_out.rows(),
            d_out.cols(),
            out.rows(),
            out.cols()
        )));
    }
    for (l, layer) in params.layers.iter().enumerate() {
        if cache.activations[l].cols() != layer.in_dim() {
            return Err(Error::Shape(format!("cache mismatch at layer {l}")));
        }
    }

    let mut grads = params.zeros_like();
    let mut delta = d_out.clone();
    for (l, layer) in params.layers.iter().enumerate().rev() {
        let a_out = &cache.activations[l + 1];
        if layer.act == Activation::Tanh {
            // d tanh(z) = 1 - tanh(z)^2, with a_out = tanh(z)
            for (d, &a) in delta.as_mut_slice().iter_mut().zip(a_out.as_slice()) {
                *d *= 1.0 - a * a;
            }
        }
        let a_in = &cache.activations[l];
        grads.layers[l].w = a_in.t_matmul(&delta)?;
        let db = &mut grads.layers[l].b;
        for r in 0..delta.rows() {
            for (acc, &d) in db.iter_mut().zip(delta.row(r)) {
                *acc += d;
            }
        }
        delta = delta.matmul_t(&layer.w)?;
    }
    Ok((grads, delta))
}
