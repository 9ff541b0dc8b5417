//! Deterministic clip → latent encoder.
//!
//! The latent is a B×F matrix of log band energies: the clip is cut into F
//! non-overlapping frames, each frame is DFT'd, and each band is
//! `ln(ε + energy in a contiguous frequency range)` clamped at a log floor.
//! Values are quantized to f32 at creation so stored latents round-trip
//! bit-exactly.

use crate::synthworld::Clip;
use crate::{Error, Result};
use rustfft::{num_complex::Complex, Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

const ENERGY_EPS: f64 = 1e-12;

/// B bands × F frames of log energies, row-major by band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Latent {
    pub bands: usize,
    pub frames: usize,
    pub values: Vec<f64>,
}

impl Latent {
    pub fn dim(&self) -> usize {
        self.bands * self.frames
    }

    pub fn get(&self, band: usize, frame: usize) -> f64 {
        self.values[band * self.frames + frame]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Mean log energy per band across frames.
    pub fn band_means(&self) -> Vec<f64> {
        (0..self.bands)
            .map(|b| {
                (0..self.frames).map(|f| self.get(b, f)).sum::<f64>() / self.frames as f64
            })
            .collect()
    }
}

pub struct LatentEncoder {
    bands: usize,
    frames: usize,
    log_floor: f64,
    fft: Arc<dyn Fft<f64>>,
    frame_len: usize,
    sample_rate: usize,
}

impl LatentEncoder {
    pub fn new(sample_rate: usize, clip_len: usize, bands: usize, frames: usize, log_floor: f64) -> Result<Self> {
        if bands == 0 || frames == 0 {
            return Err(Error::Config("bands and frames must be positive".into()));
        }
        if clip_len % frames != 0 {
            return Err(Error::Config(format!(
                "clip length {clip_len} not divisible into {frames} frames"
            )));
        }
        let frame_len = clip_len / frames;
        let fft = FftPlanner::new().plan_fft_forward(frame_len);
        Ok(LatentEncoder {
            bands,
            frames,
            log_floor,
            fft,
            frame_len,
            sample_rate,
        })
    }

    pub fn band_of(&self, freq: f64) -> usize {
        let band_width = self.sample_rate as f64 / 2.0 / self.bands as f64;
        ((freq / band_width) as usize).min(self.bands - 1)
    }

    pub fn encode(&self, clip: &Clip) -> Result<Latent> {
        if clip.len() != self.frame_len * self.frames {
            return Err(Error::Shape(format!(
                "clip length {} does not match encoder framing {}x{}",
                clip.len(),
                self.frames,
                self.frame_len
            )));
        }
        let mut values = vec![self.log_floor; self.bands * self.frames];
        let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); self.frame_len];
        let half = self.frame_len / 2;
        for f in 0..self.frames {
            let frame = &clip.samples[f * self.frame_len..(f + 1) * self.frame_len];
            for (c, &s) in buf.iter_mut().zip(frame.iter()) {
                *c = Complex::new(s, 0.0);
            }
            self.fft.process(&mut buf);
            let mut energy = vec![0.0f64; self.bands];
            let norm = (self.frame_len * self.frame_len) as f64;
            for (k, c) in buf.iter().enumerate().take(half + 1) {
                let freq = k as f64 * self.sample_rate as f64 / self.frame_len as f64;
                let weight = if k == 0 || (self.frame_len % 2 == 0 && k == half) {
                    1.0
                } else {
                    2.0
                };
                energy[self.band_of(freq)] += weight * c.norm_sqr() / norm;
            }
            for (b, &e) in energy.iter().enumerate() {
                let v = (ENERGY_EPS + e).ln().max(self.log_floor);
                // quantize so the f32 sidecar storage is lossless
                values[b * self.frames + f] = ((v as f32).max(self.log_floor as f32)) as f64;
            }
        }
        Ok(Latent {
            bands: self.bands,
            frames: self.frames,
            values,
        })
    }
}

/// One-shot convenience wrapper around [`LatentEncoder`].
pub fn encode(clip: &Clip, bands: usize, frames: usize, log_floor: f64) -> Result<Latent> {
    LatentEncoder::new(clip.sample_rate, clip.len(), bands, frames, log_floor)?.encode(clip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthworld::{render, EventClass, EventScene, EventSpec};

    fn tone_scene(freq: f64) -> EventScene {
        EventScene {
            id: 11,
            events: vec![EventSpec {
                class: EventClass::Tone,
                onset: 0.2,
                duration: 0.5,
                freq,
                freq_end: freq,
                amplitude: 0.6,
            }],
        }
    }

    #[test]
    fn silent_clip_sits_at_log_floor() {
        let clip = Clip {
            samples: vec![0.0; 8000],
            sample_rate: 8000,
        };
        let latent = encode(&clip, 8, 8, -10.0).unwrap();
        assert!(latent.values.iter().all(|&v| v == -10.0));
    }

    #[test]
    fn indivisible_framing_is_config_error() {
        let clip = Clip {
            samples: vec![0.0; 8001],
            sample_rate: 8000,
        };
        assert!(matches!(
            LatentEncoder::new(8000, 8001, 8, 8, -10.0),
            Err(Error::Config(_))
        ));
        let _ = clip;
    }

    #[test]
    fn pure_tone_dominates_its_band() {
        let clip = render(&tone_scene(440.0), 8000, 1.0);
        let enc = LatentEncoder::new(8000, 8000, 8, 8, -10.0).unwrap();
        let latent = enc.encode(&clip).unwrap();
        let band = enc.band_of(440.0);
        assert_eq!(band, 0);
        // frames fully inside [0.2, 0.7): frames 2..5 at 125 ms per frame
        for frame in 2..5 {
            let argmax = (0..8)
                .max_by(|&a, &b| latent.get(a, frame).partial_cmp(&latent.get(b, frame)).unwrap())
                .unwrap();
            assert_eq!(argmax, band, "frame {frame}");
        }
    }

    #[test]
    fn matches_naive_dft_oracle() {
        let clip = render(&tone_scene(1300.0), 8000, 1.0);
        let enc = LatentEncoder::new(8000, 8000, 8, 8, -10.0).unwrap();
        let latent = enc.encode(&clip).unwrap();

        // independent O(n^2) DFT band energies on frame 3
        let frame_len = 1000usize;
        let frame = &clip.samples[3 * frame_len..4 * frame_len];
        let mut energy = vec![0.0f64; 8];
        for k in 0..=frame_len / 2 {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (n, &s) in frame.iter().enumerate() {
                let arg = -2.0 * std::f64::consts::PI * k as f64 * n as f64 / frame_len as f64;
                re += s * arg.cos();
                im += s * arg.sin();
            }
            let weight = if k == 0 || k == frame_len / 2 { 1.0 } else { 2.0 };
            let freq = k as f64 * 8000.0 / frame_len as f64;
            let band = ((freq / 500.0) as usize).min(7);
            energy[band] += weight * (re * re + im * im) / (frame_len * frame_len) as f64;
        }
        for (b, &e) in energy.iter().enumerate() {
            let expect = ((1e-12 + e).ln().max(-10.0) as f32).max(-10.0) as f64;
            assert!(
                (latent.get(b, 3) - expect).abs() < 1e-5,
                "band {b}: {} vs {expect}",
                latent.get(b, 3)
            );
        }
    }

    #[test]
    fn encode_is_pure() {
        let clip = render(&tone_scene(2100.0), 8000, 1.0);
        let a = encode(&clip, 8, 8, -10.0).unwrap();
        let b = encode(&clip, 8, 8, -10.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tone_band_argmax_across_frequency_grid() {
        let enc = LatentEncoder::new(8000, 8000, 8, 8, -10.0).unwrap();
        for k in 2..=38 {
            let freq = k as f64 * 100.0;
            if freq % 500.0 == 0.0 {
                continue;
            }
            let clip = render(&tone_scene(freq), 8000, 1.0);
            let latent = enc.encode(&clip).unwrap();
            let means = latent.band_means();
            let argmax = (0..8)
                .max_by(|&a, &b| means[a].partial_cmp(&means[b]).unwrap())
                .unwrap();
            assert_eq!(argmax, enc.band_of(freq), "freq {freq}");
        }
    }
}
