//! Mixing-ratio sampling between original and enriched captions.

use crate::synthworld::Caption;
use crate::tensorkit::RngStream;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// ρ = probability of training on the enriched caption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixPolicy {
    pub rho: f64,
}

impl MixPolicy {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::Config(format!("mixing ratio {rho} outside [0, 1]")));
        }
        Ok(MixPolicy { rho })
    }
}

/// Returns the enriched caption with probability ρ. The enriched caption may
/// be absent only when ρ = 0.
pub fn mix_sample(
    rng: &mut RngStream,
    original: &Caption,
    enriched: Option<&Caption>,
    policy: MixPolicy,
) -> Result<Caption> {
    if policy.rho == 0.0 {
        return Ok(original.clone());
    }
    let enriched = enriched.ok_or_else(|| {
        Error::Data(format!(
            "mixing ratio {} requires an enriched caption",
            policy.rho
        ))
    })?;
    if rng.uniform() < policy.rho {
        Ok(enriched.clone())
    } else {
        Ok(original.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthworld::{CaptionSource, Vocab};

    fn captions() -> (Caption, Caption) {
        let vocab = Vocab::builtin();
        (
            Caption::new("a tone", CaptionSource::Original, vocab),
            Caption::new("a steady 400 hertz tone", CaptionSource::Enriched, vocab),
        )
    }

    #[test]
    fn rho_zero_always_original() {
        let (orig, _) = captions();
        let mut rng = RngStream::new(1, "test/mix-zero");
        for _ in 0..100 {
            let c = mix_sample(&mut rng, &orig, None, MixPolicy::new(0.0).unwrap()).unwrap();
            assert_eq!(c.source, CaptionSource::Original);
        }
    }

    #[test]
    fn rho_one_always_enriched() {
        let (orig, enr) = captions();
        let mut rng = RngStream::new(2, "test/mix-one");
        for _ in 0..100 {
            let c =
                mix_sample(&mut rng, &orig, Some(&enr), MixPolicy::new(1.0).unwrap()).unwrap();
            assert_eq!(c.source, CaptionSource::Enriched);
        }
    }

    #[test]
    fn missing_enriched_with_positive_rho_is_data_error() {
        let (orig, _) = captions();
        let mut rng = RngStream::new(3, "test/mix-missing");
        assert!(matches!(
            mix_sample(&mut rng, &orig, None, MixPolicy::new(0.5).unwrap()),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn empirical_fraction_tracks_rho() {
        let (orig, enr) = captions();
        let mut rng = RngStream::new(4, "test/mix-fraction");
        let policy = MixPolicy::new(0.7).unwrap();
        let n = 10_000;
        let mut enriched = 0usize;
        for _ in 0..n {
            if mix_sample(&mut rng, &orig, Some(&enr), policy).unwrap().source
                == CaptionSource::Enriched
            {
                enriched += 1;
            }
        }
        let frac = enriched as f64 / n as f64;
        assert!((0.68..=0.72).contains(&frac), "fraction {frac}");
    }

    #[test]
    fn invalid_rho_rejected() {
        assert!(MixPolicy::new(-0.1).is_err());
        assert!(MixPolicy::new(1.1).is_err());
    }
}
