//! Prompt rule sets: instruction templates plus style constraints that an
//! enriched caption must satisfy.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Scene facts a rule set can require the rewriter to mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactField {
    Class,
    Frequency,
    Onset,
    Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptRuleSet {
    pub id: String,
    /// Instruction handed to the rewriter; `{caption}` and `{events}` are
    /// replaced with the base caption and serialized event metadata.
    pub instruction: String,
    pub min_words: usize,
    pub max_words: usize,
    pub must_mention: Vec<FactField>,
}

impl PromptRuleSet {
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::Config("rule set id must be nonempty".into()));
        }
        if !self.instruction.contains("{caption}") {
            return Err(Error::Config(format!(
                "rule set {} instruction lacks the {{caption}} placeholder",
                self.id
            )));
        }
        if self.min_words == 0 || self.min_words > self.max_words {
            return Err(Error::Config(format!(
                "rule set {} has invalid word-length range {}..={}",
                self.id, self.min_words, self.max_words
            )));
        }
        Ok(())
    }

    pub fn render_instruction(&self, caption: &str, events_json: &str) -> String {
        self.instruction
            .replace("{caption}", caption)
            .replace("{events}", events_json)
    }

    pub fn mentions(&self, field: FactField) -> bool {
        self.must_mention.contains(&field)
    }
}

/// Frequencies are described on a 100 Hz grid.
pub fn round_freq(freq: f64) -> u32 {
    ((freq / 100.0).round() as u32) * 100
}

/// Onsets and durations are described to one decimal second.
pub fn round_secs(secs: f64) -> f64 {
    (secs * 10.0).round() / 10.0
}

/// The shipped rule sets, ordered from terse to fully detailed.
pub fn default_rulesets() -> Vec<PromptRuleSet> {
    vec![
        PromptRuleSet {
            id: "rs-class".into(),
            instruction: "Rewrite the caption '{caption}' naming every sound in order. Events: {events}".into(),
            min_words: 2,
            max_words: 40,
            must_mention: vec![FactField::Class],
        },
        PromptRuleSet {
            id: "rs-class-freq".into(),
            instruction: "Rewrite the caption '{caption}' naming every sound in order with its frequency in hertz. Events: {events}".into(),
            min_words: 2,
            max_words: 60,
            must_mention: vec![FactField::Class, FactField::Frequency],
        },
        PromptRuleSet {
            id: "rs-full".into(),
            instruction: "Rewrite the caption '{caption}' naming every sound in order with its frequency in hertz, start time and duration in seconds. Events: {events}".into(),
            min_words: 4,
            max_words: 90,
            must_mention: vec![
                FactField::Class,
                FactField::Frequency,
                FactField::Onset,
                FactField::Duration,
            ],
        },
    ]
}
