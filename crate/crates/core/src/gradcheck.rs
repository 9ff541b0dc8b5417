//! Central finite-difference gradient oracle.
//!
//! This module is verification machinery: it only ever evaluates a loss
//! closure, never any backward pass, so it stays independent of the
//! gradients it is used to check.

use crate::tensorkit::MlpParams;

/// Central differences over every parameter: `(L(p+h) − L(p−h)) / 2h`.
pub fn finite_diff_grads(
    params: &MlpParams,
    loss: impl Fn(&MlpParams) -> f64,
    h: f64,
) -> MlpParams {
    let flat = params.flatten();
    let mut grads = vec![0.0; flat.len()];
    for i in 0..flat.len() {
        let mut plus = flat.clone();
        plus[i] += h;
        let mut minus = flat.clone();
        minus[i] -= h;
        let lp = loss(&params.from_flat(&plus).unwrap());
        let lm = loss(&params.from_flat(&minus).unwrap());
        grads[i] = (lp - lm) / (2.0 * h);
    }
    params.from_flat(&grads).unwrap()
}

/// Worst-case `|a − n| / max(|a|, |n|, floor)` over all parameters. The floor
/// keeps round-off noise on near-zero gradients from dominating.
pub fn max_rel_error(analytic: &MlpParams, numeric: &MlpParams) -> f64 {
    let a = analytic.flatten();
    let n = numeric.flatten();
    assert_eq!(a.len(), n.len(), "gradient shapes must match");
    a.iter()
        .zip(n.iter())
        .map(|(&x, &y)| (x - y).abs() / x.abs().max(y.abs()).max(1e-4))
        .fold(0.0, f64::max)
}
