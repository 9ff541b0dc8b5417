//! Cosine annealing learning-rate schedule.

use crate::{Error, Result};

/// `lr_min + ½(lr_max − lr_min)(1 + cos(π·step/total))`, exact at both ends.
pub fn cosine_lr(step: usize, total_steps: usize, lr_max: f64, lr_min: f64) -> Result<f64> {
    if step > total_steps {
        return Err(Error::Range(format!(
            "step {step} exceeds total_steps {total_steps}"
        )));
    }
    if !(lr_max >= lr_min && lr_min > 0.0) {
        return Err(Error::Config(format!(
            "need lr_max >= lr_min > 0, got lr_max={lr_max} lr_min={lr_min}"
        )));
    }
    if step == 0 {
        return Ok(lr_max);
    }
    if step == total_steps {
        return Ok(lr_min);
    }
    let frac = step as f64 / total_steps as f64;
    Ok(lr_min + 0.5 * (lr_max - lr_min) * (1.0 + (std::f64::consts::PI * frac).cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        assert_eq!(cosine_lr(0, 1000, 1e-4, 5e-6).unwrap(), 1e-4);
        assert_eq!(cosine_lr(1000, 1000, 1e-4, 5e-6).unwrap(), 5e-6);
    }

    #[test]
    fn midpoint_value() {
        let lr = cosine_lr(500, 1000, 1e-4, 5e-6).unwrap();
        assert!((lr - 5.25e-5).abs() < 1e-12, "lr {lr}");
    }

    #[test]
    fn non_increasing() {
        let mut prev = f64::INFINITY;
        for step in 0..=257 {
            let lr = cosine_lr(step, 257, 3e-3, 1e-6).unwrap();
            assert!(lr <= prev + 1e-18, "step {step}");
            prev = lr;
        }
    }

    #[test]
    fn step_past_total_is_range_error() {
        assert!(matches!(
            cosine_lr(11, 10, 1e-4, 5e-6),
            Err(Error::Range(_))
        ));
    }
}
