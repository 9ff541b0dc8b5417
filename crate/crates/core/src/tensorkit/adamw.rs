//! AdamW with decoupled weight decay.

use crate::tensorkit::MlpParams;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            weight_decay: 0.01,
        }
    }
}

/// First/second moment accumulators, shaped like the parameters they track.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamWState {
    pub m: MlpParams,
    pub v: MlpParams,
    pub step: u64,
    pub cfg: AdamWConfig,
}

impl AdamWState {
    pub fn new(params: &MlpParams, cfg: AdamWConfig) -> Self {
        AdamWState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
            cfg,
        }
    }
}

/// One optimizer step. Weight decay is decoupled: parameters are scaled by
/// `1 − lr·λ` before the bias-corrected Adam update is subtracted.
pub fn adamw_step(
    state: &mut AdamWState,
    params: &mut MlpParams,
    grads: &MlpParams,
    lr: f64,
) -> Result<()> {
    if lr <= 0.0 {
        return Err(Error::Config(format!("learning rate must be > 0, got {lr}")));
    }
    if params.layers.len() != grads.layers.len() {
        return Err(Error::Shape("gradient layer count mismatch".into()));
    }
    for (l, (p, g)) in params.layers.iter().zip(grads.layers.iter()).enumerate() {
        if p.in_dim() != g.in_dim() || p.out_dim() != g.out_dim() {
            return Err(Error::Shape(format!("gradient shape mismatch at layer {l}")));
        }
        if !g.w.is_finite() || !g.b.iter().all(|v| v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite gradient at layer {l}")));
        }
    }

    state.step += 1;
    let t = state.step as i32;
    let AdamWConfig {
        beta1,
        beta2,
        eps,
        weight_decay,
    } = state.cfg;
    let bc1 = 1.0 - beta1.powi(t);
    let bc2 = 1.0 - beta2.powi(t);
    let decay = 1.0 - lr * weight_decay;

    for (l, layer) in params.layers.iter_mut().enumerate() {
        let g = &grads.layers[l];
        let m = &mut state.m.layers[l];
        let v = &mut state.v.layers[l];

        let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *p *= decay;
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        };

        for ((p, &gv), (mv, vv)) in layer
            .w
            .as_mut_slice()
            .iter_mut()
            .zip(g.w.as_slice())
            .zip(m.w.as_mut_slice().iter_mut().zip(v.w.as_mut_slice().iter_mut()))
        {
            update(p, gv, mv, vv);
        }
        for ((p, &gv), (mv, vv)) in layer
            .b
            .iter_mut()
            .zip(g.b.iter())
            .zip(m.b.iter_mut().zip(v.b.iter_mut()))
        {
            update(p, gv, mv, vv);
        }
    }
    Ok(())
}
