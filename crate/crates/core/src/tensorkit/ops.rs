//! Small vector operations shared across modules.

use crate::{Error, Result};

/// Numerically stable softmax (max-shifted).
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>> {
    if logits.is_empty() {
        return Err(Error::Shape("softmax of empty vector".into()));
    }
    if !logits.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("softmax of non-finite logits".into()));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.iter().map(|&e| e / sum).collect())
}

/// Scale a vector to unit L2 norm. Near-zero vectors are left direction-free
/// but finite by the tiny denominator guard.
pub fn l2_normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let denom = norm.max(1e-30);
    v.iter().map(|x| x / denom).collect()
}
