//! Programmatic fidelity scoring and rule-set selection.
//!
//! A record's facts are its class sequence, each event's rounded onset, and
//! each tone/chirp's rounded frequencies; the score of a caption is the
//! fraction of those facts recoverable from the text.

use crate::captionaug::{round_freq, round_secs, PromptRuleSet, Rewriter, RewriterRequest};
use crate::captionaug::rewriter::EventSummary;
use crate::synthworld::{Caption, CaptionSource, EventClass, EventScene, Vocab};
use crate::{Error, Result};

/// Scores how faithfully `text` describes `scene`, in [0, 1].
pub type FidelityScorer = dyn Fn(&EventScene, &str) -> f64 + Sync;

/// Fraction of scene facts recoverable from the text.
pub fn fact_recovery_score(scene: &EventScene, text: &str) -> f64 {
    let vocab = Vocab::builtin();
    let caption = Caption::new(text, CaptionSource::Enriched, vocab);
    let words: Vec<&str> = caption.tokens.iter().map(|&t| vocab.word(t)).collect();
    let has = |needle: &str| words.iter().any(|w| *w == needle);

    let mut total = 0usize;
    let mut recovered = 0usize;

    // one fact: the ordered class sequence
    total += 1;
    if caption.class_sequence(vocab) == scene.class_sequence() {
        recovered += 1;
    }

    for e in &scene.events {
        // rounded onset
        total += 1;
        if has(&format!("{:.1}", round_secs(e.onset))) {
            recovered += 1;
        }
        // rounded frequencies (tone: one; chirp: start and end)
        if e.class != EventClass::Noise {
            total += 1;
            let start_ok = has(&round_freq(e.freq).to_string());
            let end_ok =
                e.class != EventClass::Chirp || has(&round_freq(e.freq_end).to_string());
            if start_ok && end_ok {
                recovered += 1;
            }
        }
    }
    recovered as f64 / total as f64
}

/// Mean fidelity of one rule set over an evaluation subset.
pub fn score_ruleset(
    client: &dyn Rewriter,
    ruleset: &PromptRuleSet,
    subset: &[(EventScene, Caption)],
    scorer: &FidelityScorer,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Data("rule-set evaluation subset is empty".into()));
    }
    ruleset.validate()?;
    let mut sum = 0.0;
    for (scene, base) in subset {
        let response = client.rewrite(&RewriterRequest {
            ruleset: ruleset.id.clone(),
            caption: base.text.clone(),
            events: EventSummary::from_scene(scene),
        })?;
        sum += scorer(scene, &response.text);
    }
    Ok(sum / subset.len() as f64)
}

/// Argmax of mean score; exact ties break to the lexicographically lowest id.
pub fn select_ruleset(
    client: &dyn Rewriter,
    rulesets: &[PromptRuleSet],
    subset: &[(EventScene, Caption)],
    scorer: &FidelityScorer,
) -> Result<String> {
    if rulesets.is_empty() {
        return Err(Error::Config("no rule sets to select from".into()));
    }
    let mut best: Option<(f64, &str)> = None;
    for rs in rulesets {
        let score = score_ruleset(client, rs, subset, scorer)?;
        best = match best {
            None => Some((score, &rs.id)),
            Some((b, id)) if score > b || (score == b && rs.id.as_str() < id) => {
                Some((score, &rs.id))
            }
            keep => keep,
        };
    }
    Ok(best.expect("nonempty rule sets").1.to_string())
}
