//! Captions and the closed, versioned vocabulary they tokenize under.
//!
//! Base captions are deliberately terse: class words joined by "then" in
//! onset order, no timing or frequency detail. Enriched captions (from the
//! caption-augmentation pipeline) use the same vocabulary, which includes a
//! 100 Hz frequency grid and one-decimal second values; anything outside the
//! vocabulary maps to the reserved UNK token.

use crate::synthworld::{EventClass, EventScene};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::OnceLock;

pub const VOCAB_VERSION: &str = "v1";
pub const UNK_WORD: &str = "<unk>";

#[derive(Debug, Clone)]
pub struct Vocab {
    pub version: String,
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    pub fn from_words(version: &str, words: Vec<String>) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        Vocab {
            version: version.to_string(),
            words,
            index,
        }
    }

    /// The vocabulary shipped with the crate.
    pub fn builtin() -> &'static Vocab {
        static VOCAB: OnceLock<Vocab> = OnceLock::new();
        VOCAB.get_or_init(|| {
            let mut words: Vec<String> = vec![
                UNK_WORD, "a", "then", "tone", "chirp", "noise", "steady", "hertz", "sweeping",
                "from", "to", "starting", "at", "seconds", "for", "lasting", "burst", "of",
            ]
            .into_iter()
            .map(str::to_string)
            .collect();
            for k in 1..=39 {
                words.push(format!("{}", k * 100));
            }
            for k in 0..=10 {
                words.push(format!("{:.1}", k as f64 / 10.0));
            }
            Vocab::from_words(VOCAB_VERSION, words)
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    /// Lowercase, split on whitespace, strip edge punctuation; unknown → UNK.
    pub fn tokenize(&self, text: &str) -> Vec<u32> {
        normalize_words(text)
            .map(|w| self.id(&w).unwrap_or(0))
            .collect()
    }

    pub fn detokenize(&self, tokens: &[u32]) -> String {
        tokens
            .iter()
            .map(|&t| self.word(t))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn normalize_words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace().filter_map(|raw| {
        let w: String = raw
            .trim_matches(|c: char| c.is_ascii_punctuation() && c != '.')
            .trim_end_matches('.')
            .to_lowercase();
        // keep interior decimal points ("0.3"); a bare trailing period is gone
        if w.is_empty() {
            None
        } else {
            Some(w)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaptionSource {
    Original,
    Enriched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caption {
    pub text: String,
    pub tokens: Vec<u32>,
    pub source: CaptionSource,
}

impl Caption {
    pub fn new(text: impl Into<String>, source: CaptionSource, vocab: &Vocab) -> Self {
        let text = text.into();
        let tokens = vocab.tokenize(&text);
        Caption {
            text,
            tokens,
            source,
        }
    }

    /// Class words appearing in the text, in order (with repeats).
    pub fn class_sequence(&self, vocab: &Vocab) -> Vec<EventClass> {
        self.tokens
            .iter()
            .filter_map(|&t| match vocab.word(t) {
                "tone" => Some(EventClass::Tone),
                "chirp" => Some(EventClass::Chirp),
                "noise" => Some(EventClass::Noise),
                _ => None,
            })
            .collect()
    }
}

/// The terse original caption: class words joined by "then" in onset order.
pub fn base_caption(scene: &EventScene) -> Caption {
    let mut text = String::from("a ");
    for (i, e) in scene.events.iter().enumerate() {
        if i > 0 {
            text.push_str(" then ");
        }
        text.push_str(e.class.word());
    }
    Caption::new(text, CaptionSource::Original, Vocab::builtin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthworld::EventSpec;

    fn scene_of(classes: &[EventClass]) -> EventScene {
        EventScene {
            id: 1,
            events: classes
                .iter()
                .enumerate()
                .map(|(i, &class)| EventSpec {
                    class,
                    onset: 0.1 * i as f64,
                    duration: 0.2,
                    freq: if class == EventClass::Noise { 0.0 } else { 400.0 },
                    freq_end: if class == EventClass::Noise { 0.0 } else { 400.0 },
                    amplitude: 0.5,
                })
                .collect(),
        }
    }

    #[test]
    fn single_tone_template() {
        let c = base_caption(&scene_of(&[EventClass::Tone]));
        assert_eq!(c.text, "a tone");
        assert_eq!(c.source, CaptionSource::Original);
    }

    #[test]
    fn two_events_joined_by_then() {
        let c = base_caption(&scene_of(&[EventClass::Tone, EventClass::Noise]));
        assert_eq!(c.text, "a tone then noise");
    }

    #[test]
    fn captions_ignore_event_parameters() {
        let mut a = scene_of(&[EventClass::Tone, EventClass::Chirp]);
        let mut b = scene_of(&[EventClass::Tone, EventClass::Chirp]);
        a.events[0].freq = 400.0;
        b.events[0].freq = 2600.0;
        a.events[1].onset = 0.3;
        b.events[1].onset = 0.5;
        assert_eq!(base_caption(&a).text, base_caption(&b).text);
    }

    #[test]
    fn caption_parses_back_to_class_sequence() {
        let classes = [EventClass::Noise, EventClass::Tone, EventClass::Tone];
        let c = base_caption(&scene_of(&classes));
        assert_eq!(c.class_sequence(Vocab::builtin()), classes.to_vec());
    }

    #[test]
    fn tokens_round_trip_for_in_vocab_text() {
        let vocab = Vocab::builtin();
        let text = "a steady 400 hertz tone starting at 0.3 seconds";
        let c = Caption::new(text, CaptionSource::Enriched, vocab);
        assert!(c.tokens.iter().all(|&t| t != 0));
        assert_eq!(vocab.detokenize(&c.tokens), text);
    }

    #[test]
    fn unknown_words_map_to_unk() {
        let vocab = Vocab::builtin();
        let c = Caption::new("a zonkified tone", CaptionSource::Enriched, vocab);
        assert_eq!(c.tokens[1], 0);
        assert_eq!(vocab.word(c.tokens[1]), UNK_WORD);
    }
}
