//! Description augmentation: prompt rule sets, a pluggable text rewriter
//! (with a deterministic rule-based implementation standing in for an LLM),
//! fidelity scoring for rule-set selection, and mixing-ratio sampling of
//! original vs. enriched captions.

mod mix;
mod rewriter;
mod ruleset;
mod score;

pub use mix::{mix_sample, MixPolicy};
pub use rewriter::{
    enrich, EventSummary, HttpRewriter, Rewriter, RewriterRequest, RewriterResponse, RuleRewriter,
    SubprocessRewriter, DEFAULT_TIMEOUT,
};
pub use ruleset::{default_rulesets, round_freq, round_secs, FactField, PromptRuleSet};
pub use score::{fact_recovery_score, score_ruleset, select_ruleset, FidelityScorer};
