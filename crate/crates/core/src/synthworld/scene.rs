//! Parametric audio event scenes and the grammar they are sampled from.

use crate::tensorkit::RngStream;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventClass {
    Tone,
    Chirp,
    Noise,
}

impl EventClass {
    pub const ALL: [EventClass; 3] = [EventClass::Tone, EventClass::Chirp, EventClass::Noise];

    pub fn index(self) -> usize {
        match self {
            EventClass::Tone => 0,
            EventClass::Chirp => 1,
            EventClass::Noise => 2,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            EventClass::Tone => "tone",
            EventClass::Chirp => "chirp",
            EventClass::Noise => "noise",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSpec {
    pub class: EventClass,
    /// Seconds from clip start.
    pub onset: f64,
    pub duration: f64,
    /// Tone frequency or chirp start frequency, Hz; 0 for noise.
    pub freq: f64,
    /// Chirp end frequency, Hz; equals `freq` for tones, 0 for noise.
    pub freq_end: f64,
    /// Peak amplitude in (0, 1].
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventScene {
    pub id: u64,
    /// Ordered by onset, non-decreasing.
    pub events: Vec<EventSpec>,
}

impl EventScene {
    /// Distinct classes present, in index order (set semantics).
    pub fn class_set(&self) -> Vec<EventClass> {
        let mut present = [false; 3];
        for e in &self.events {
            present[e.class.index()] = true;
        }
        EventClass::ALL
            .iter()
            .copied()
            .filter(|c| present[c.index()])
            .collect()
    }

    /// Stable bucket key for per-condition-class statistics, e.g. "chirp+tone".
    pub fn class_set_key(&self) -> String {
        self.class_set()
            .iter()
            .map(|c| c.word())
            .collect::<Vec<_>>()
            .join("+")
    }

    /// Classes in onset order (with repeats).
    pub fn class_sequence(&self) -> Vec<EventClass> {
        self.events.iter().map(|e| e.class).collect()
    }

    pub fn validate(&self, clip_seconds: f64, sample_rate: usize) -> Result<()> {
        if self.events.is_empty() {
            return Err(Error::Data(format!("scene {} has no events", self.id)));
        }
        let nyquist = sample_rate as f64 / 2.0;
        let mut prev_onset = 0.0;
        for (i, e) in self.events.iter().enumerate() {
            if e.onset < 0.0 || e.onset + e.duration > clip_seconds + 1e-9 {
                return Err(Error::Data(format!(
                    "scene {} event {i} window [{:.3}, {:.3}] outside clip",
                    self.id,
                    e.onset,
                    e.onset + e.duration
                )));
            }
            if e.onset < prev_onset {
                return Err(Error::Data(format!("scene {} onsets out of order", self.id)));
            }
            prev_onset = e.onset;
            if e.class != EventClass::Noise && !(e.freq > 0.0 && e.freq < nyquist) {
                return Err(Error::Data(format!(
                    "scene {} event {i} frequency {} outside (0, {nyquist})",
                    self.id, e.freq
                )));
            }
            if !(e.amplitude > 0.0 && e.amplitude <= 1.0) {
                return Err(Error::Data(format!(
                    "scene {} event {i} amplitude {} outside (0, 1]",
                    self.id, e.amplitude
                )));
            }
        }
        Ok(())
    }
}

/// Distribution the scene sampler draws from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarConfig {
    pub sample_rate: usize,
    pub clip_seconds: f64,
    /// Weight of scenes with 1, 2, … events; length is the max event count.
    pub event_count_weights: Vec<f64>,
    /// Weights for (tone, chirp, noise).
    pub class_weights: [f64; 3],
    pub onset_range: (f64, f64),
    pub duration_range: (f64, f64),
    /// Allowed tone / chirp frequencies, Hz.
    pub freq_grid: Vec<f64>,
    pub amp_range: (f64, f64),
}

impl Default for GrammarConfig {
    fn default() -> Self {
        // 100 Hz grid, away from the 500 Hz band edges so a tone's energy
        // stays inside a single latent band.
        let freq_grid = (2..=38)
            .map(|k| k as f64 * 100.0)
            .filter(|f| f % 500.0 != 0.0)
            .collect();
        GrammarConfig {
            sample_rate: 8000,
            clip_seconds: 1.0,
            event_count_weights: vec![1.0, 1.0, 1.0],
            class_weights: [0.5, 0.25, 0.25],
            onset_range: (0.0, 0.55),
            duration_range: (0.2, 0.4),
            freq_grid,
            amp_range: (0.3, 0.9),
        }
    }
}

impl GrammarConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 || self.clip_seconds <= 0.0 {
            return Err(Error::Config("sample_rate and clip_seconds must be positive".into()));
        }
        if self.event_count_weights.is_empty()
            || self.event_count_weights.iter().any(|w| *w < 0.0)
            || self.event_count_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::Config("event_count_weights must be nonnegative, nonzero".into()));
        }
        if self.class_weights.iter().any(|w| *w < 0.0)
            || self.class_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::Config("class_weights must be nonnegative, nonzero".into()));
        }
        let (on_lo, on_hi) = self.onset_range;
        let (du_lo, du_hi) = self.duration_range;
        if !(0.0 <= on_lo && on_lo <= on_hi) || !(0.0 < du_lo && du_lo <= du_hi) {
            return Err(Error::Config("invalid onset or duration range".into()));
        }
        if on_hi + du_lo > self.clip_seconds {
            return Err(Error::Config(format!(
                "max onset {} + min duration {} exceeds clip length {}",
                on_hi, du_lo, self.clip_seconds
            )));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        if self.freq_grid.is_empty() || self.freq_grid.iter().any(|f| !(*f > 0.0 && *f < nyquist)) {
            return Err(Error::Config(format!(
                "freq_grid must be nonempty within (0, {nyquist})"
            )));
        }
        let (a_lo, a_hi) = self.amp_range;
        if !(0.0 < a_lo && a_lo <= a_hi && a_hi <= 1.0) {
            return Err(Error::Config("amp_range must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Draw one scene. The event count, classes, onsets, durations, frequencies
/// and amplitudes all come from `rng` in a fixed order, so a stream replays
/// to the same scene.
pub fn sample_scene(rng: &mut RngStream, grammar: &GrammarConfig, id: u64) -> Result<EventScene> {
    grammar.validate()?;
    let count = rng.weighted_index(&grammar.event_count_weights) + 1;
    let mut events = Vec::with_capacity(count);
    for _ in 0..count {
        let class = EventClass::ALL[rng.weighted_index(&grammar.class_weights)];
        let onset = rng.range(grammar.onset_range.0, grammar.onset_range.1);
        let max_dur = grammar.duration_range.1.min(grammar.clip_seconds - onset);
        let duration = rng.range(grammar.duration_range.0, max_dur);
        let (freq, freq_end) = match class {
            EventClass::Noise => {
                (0.0, 0.0)
            }
            EventClass::Tone => {
                let f = grammar.freq_grid[rng.index(grammar.freq_grid.len())];
                (f, f)
            }
            EventClass::Chirp => {
                let i = rng.index(grammar.freq_grid.len());
                // end frequency differs from the start by a nonzero grid offset
                let j = if grammar.freq_grid.len() > 1 {
                    (i + 1 + rng.index(grammar.freq_grid.len() - 1)) % grammar.freq_grid.len()
                } else {
                    i
                };
                (grammar.freq_grid[i], grammar.freq_grid[j])
            }
        };
        let amplitude = rng.range(grammar.amp_range.0, grammar.amp_range.1);
        events.push(EventSpec {
            class,
            onset,
            duration,
            freq,
            freq_end,
            amplitude,
        });
    }
    events.sort_by(|a, b| a.onset.partial_cmp(&b.onset).unwrap());
    let scene = EventScene { id, events };
    scene.validate(grammar.clip_seconds, grammar.sample_rate)?;
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_grammar_forces_single_tone() {
        let grammar = GrammarConfig {
            event_count_weights: vec![1.0],
            class_weights: [1.0, 0.0, 0.0],
            ..GrammarConfig::default()
        };
        let mut rng = RngStream::new(1, "test/scene-degenerate");
        let scene = sample_scene(&mut rng, &grammar, 0).unwrap();
        assert_eq!(scene.events.len(), 1);
        assert_eq!(scene.events[0].class, EventClass::Tone);
    }

    #[test]
    fn same_seed_same_scene() {
        let grammar = GrammarConfig::default();
        let mut a = RngStream::new(42, "test/scene-repro");
        let mut b = RngStream::new(42, "test/scene-repro");
        assert_eq!(
            sample_scene(&mut a, &grammar, 7).unwrap(),
            sample_scene(&mut b, &grammar, 7).unwrap()
        );
    }

    #[test]
    fn class_frequencies_match_weights() {
        let grammar = GrammarConfig {
            event_count_weights: vec![1.0],
            ..GrammarConfig::default()
        };
        let mut rng = RngStream::new(5, "test/scene-multinomial");
        let n = 10_000;
        let mut counts = [0usize; 3];
        for i in 0..n {
            let scene = sample_scene(&mut rng, &grammar, i as u64).unwrap();
            counts[scene.events[0].class.index()] += 1;
        }
        for (c, w) in counts.iter().zip(grammar.class_weights.iter()) {
            assert!(
                (*c as f64 / n as f64 - w).abs() <= 0.02,
                "class freq {} vs weight {w}",
                *c as f64 / n as f64
            );
        }
    }

    #[test]
    fn infeasible_grammar_is_config_error() {
        let grammar = GrammarConfig {
            duration_range: (1.5, 2.0),
            ..GrammarConfig::default()
        };
        let mut rng = RngStream::new(1, "test/scene-bad");
        assert!(matches!(
            sample_scene(&mut rng, &grammar, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn onsets_sorted_and_windows_inside_clip() {
        let grammar = GrammarConfig::default();
        let mut rng = RngStream::new(9, "test/scene-invariants");
        for i in 0..200 {
            let scene = sample_scene(&mut rng, &grammar, i).unwrap();
            let mut prev = 0.0;
            for e in &scene.events {
                assert!(e.onset >= prev);
                assert!(e.onset + e.duration <= grammar.clip_seconds + 1e-12);
                prev = e.onset;
            }
        }
    }
}
