//! Deterministic waveform rendering of event scenes.
//!
//! Tones are `amp·sin(2π f n/sr)` on absolute sample time, chirps sweep
//! linearly from `freq` to `freq_end` over the event window, noise is
//! amplitude-scaled uniform noise from a scene-derived stream. Overlapping
//! events sum and the result is hard-clipped to [−1, 1].

use crate::synthworld::{EventClass, EventScene};
use crate::tensorkit::RngStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clip {
    pub samples: Vec<f64>,
    pub sample_rate: usize,
}

impl Clip {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// SHA-256 of the little-endian sample bytes.
    pub fn sha256(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for s in &self.samples {
            hasher.update(s.to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Sample indices n with `onset ≤ n/sr < onset + duration`, clamped to the clip.
fn event_window(onset: f64, duration: f64, sr: usize, total: usize) -> (usize, usize) {
    let sr = sr as f64;
    let start = (onset * sr).ceil() as usize;
    let end = ((onset + duration) * sr).ceil() as usize;
    (start.min(total), end.min(total))
}

pub fn render(scene: &EventScene, sample_rate: usize, clip_seconds: f64) -> Clip {
    let total = (sample_rate as f64 * clip_seconds).round() as usize;
    let mut samples = vec![0.0f64; total];
    let sr = sample_rate as f64;

    for (idx, e) in scene.events.iter().enumerate() {
        let (start, end) = event_window(e.onset, e.duration, sample_rate, total);
        match e.class {
            EventClass::Tone => {
                for (n, s) in samples[start..end].iter_mut().enumerate() {
                    let t = (start + n) as f64 / sr;
                    *s += e.amplitude * (TAU * e.freq * t).sin();
                }
            }
            EventClass::Chirp => {
                let sweep = e.freq_end - e.freq;
                for (n, s) in samples[start..end].iter_mut().enumerate() {
                    let tau_rel = (start + n) as f64 / sr - e.onset;
                    let phase = TAU * (e.freq * tau_rel + sweep * tau_rel * tau_rel / (2.0 * e.duration));
                    *s += e.amplitude * phase.sin();
                }
            }
            EventClass::Noise => {
                let mut rng = RngStream::new(scene.id, &format!("render/noise/{idx}"));
                for s in samples[start..end].iter_mut() {
                    *s += e.amplitude * (2.0 * rng.uniform() - 1.0);
                }
            }
        }
    }
    for s in &mut samples {
        *s = s.clamp(-1.0, 1.0);
    }
    Clip {
        samples,
        sample_rate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthworld::EventSpec;

    fn tone_scene(id: u64, onset: f64, duration: f64, freq: f64, amp: f64) -> EventScene {
        EventScene {
            id,
            events: vec![EventSpec {
                class: EventClass::Tone,
                onset,
                duration,
                freq,
                freq_end: freq,
                amplitude: amp,
            }],
        }
    }

    #[test]
    fn silence_outside_event_windows() {
        let scene = tone_scene(1, 0.25, 0.25, 440.0, 0.5);
        let clip = render(&scene, 8000, 1.0);
        assert_eq!(clip.len(), 8000);
        for (n, s) in clip.samples.iter().enumerate() {
            let t = n as f64 / 8000.0;
            if !(0.25..0.5).contains(&t) {
                assert_eq!(*s, 0.0, "sample {n} not silent");
            }
        }
    }

    #[test]
    fn tone_matches_analytic_definition() {
        let scene = tone_scene(2, 0.1, 0.3, 440.0, 0.5);
        let clip = render(&scene, 8000, 1.0);
        for n in 800..3200 {
            let expect = 0.5 * (TAU * 440.0 * n as f64 / 8000.0).sin();
            assert!((clip.samples[n] - expect).abs() < 1e-12, "sample {n}");
        }
    }

    #[test]
    fn overlapping_tones_clip_to_unit() {
        let scene = EventScene {
            id: 3,
            events: vec![
                EventSpec {
                    class: EventClass::Tone,
                    onset: 0.1,
                    duration: 0.5,
                    freq: 300.0,
                    freq_end: 300.0,
                    amplitude: 0.9,
                },
                EventSpec {
                    class: EventClass::Tone,
                    onset: 0.1,
                    duration: 0.5,
                    freq: 300.0,
                    freq_end: 300.0,
                    amplitude: 0.9,
                },
            ],
        };
        let clip = render(&scene, 8000, 1.0);
        // summation-then-clip oracle on the raw event sum
        let mut expected_max: f64 = 0.0;
        for n in 800..4800 {
            let raw = 1.8 * (TAU * 300.0 * n as f64 / 8000.0).sin();
            expected_max = expected_max.max(raw.clamp(-1.0, 1.0).abs());
            assert!((clip.samples[n] - raw.clamp(-1.0, 1.0)).abs() < 1e-12);
        }
        let max = clip.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert_eq!(max, 1.0);
        assert_eq!(expected_max, 1.0);
    }

    #[test]
    fn render_is_deterministic_for_noise() {
        let scene = EventScene {
            id: 4,
            events: vec![EventSpec {
                class: EventClass::Noise,
                onset: 0.2,
                duration: 0.3,
                freq: 0.0,
                freq_end: 0.0,
                amplitude: 0.7,
            }],
        };
        let a = render(&scene, 8000, 1.0);
        let b = render(&scene, 8000, 1.0);
        assert_eq!(a, b);
        let peak = a.samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!(peak <= 0.7 + 1e-12);
        assert!(peak > 0.1);
    }
}
