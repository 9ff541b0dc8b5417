//! The pluggable caption rewriter and the `enrich` operation.
//!
//! Wire format, shared by the subprocess and HTTP transports: request
//! `{"ruleset": str, "caption": str, "events": [...]}` newline-terminated,
//! response `{"text": str}` newline-terminated. The built-in [`RuleRewriter`]
//! speaks the same request type in-process and is fully deterministic.

use crate::captionaug::{round_freq, round_secs, FactField, PromptRuleSet};
use crate::synthworld::{Caption, CaptionSource, EventClass, EventScene, Vocab};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{channel, Receiver};
use std::sync::Mutex;
use std::time::Duration;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Rounded event metadata serialized into rewriter requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub class: String,
    pub onset_s: f64,
    pub duration_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq_hz: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freq_end_hz: Option<u32>,
}

impl EventSummary {
    pub fn from_scene(scene: &EventScene) -> Vec<EventSummary> {
        scene
            .events
            .iter()
            .map(|e| EventSummary {
                class: e.class.word().to_string(),
                onset_s: round_secs(e.onset),
                duration_s: round_secs(e.duration),
                freq_hz: (e.class != EventClass::Noise).then(|| round_freq(e.freq)),
                freq_end_hz: (e.class == EventClass::Chirp).then(|| round_freq(e.freq_end)),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewriterRequest {
    pub ruleset: String,
    pub caption: String,
    pub events: Vec<EventSummary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewriterResponse {
    pub text: String,
}

pub trait Rewriter: Send + Sync {
    fn rewrite(&self, request: &RewriterRequest) -> Result<RewriterResponse>;
    fn name(&self) -> &str;
}

/// Deterministic rule-based rewriter: one sentence fragment per event,
/// including exactly the fields the rule set requires.
pub struct RuleRewriter {
    rulesets: Vec<PromptRuleSet>,
}

impl RuleRewriter {
    pub fn new(rulesets: Vec<PromptRuleSet>) -> Self {
        RuleRewriter { rulesets }
    }

    pub fn with_defaults() -> Self {
        RuleRewriter::new(crate::captionaug::default_rulesets())
    }

    fn event_phrase(event: &EventSummary, ruleset: &PromptRuleSet) -> String {
        let mut phrase = match (event.class.as_str(), ruleset.mentions(FactField::Frequency)) {
            ("tone", true) => format!("a steady {} hertz tone", event.freq_hz.unwrap_or(0)),
            ("chirp", true) => format!(
                "a chirp sweeping from {} to {} hertz",
                event.freq_hz.unwrap_or(0),
                event.freq_end_hz.unwrap_or(0)
            ),
            ("noise", _) => "a burst of noise".to_string(),
            (other, _) => format!("a {other}"),
        };
        if ruleset.mentions(FactField::Onset) {
            phrase.push_str(&format!(" starting at {:.1} seconds", event.onset_s));
        }
        if ruleset.mentions(FactField::Duration) {
            phrase.push_str(&format!(" lasting {:.1} seconds", event.duration_s));
        }
        phrase
    }
}

impl Rewriter for RuleRewriter {
    fn rewrite(&self, request: &RewriterRequest) -> Result<RewriterResponse> {
        let ruleset = self
            .rulesets
            .iter()
            .find(|rs| rs.id == request.ruleset)
            .ok_or_else(|| Error::Config(format!("unknown rule set '{}'", request.ruleset)))?;
        let text = request
            .events
            .iter()
            .map(|e| Self::event_phrase(e, ruleset))
            .collect::<Vec<_>>()
            .join(" then ");
        Ok(RewriterResponse { text })
    }

    fn name(&self) -> &str {
        "rule-rewriter"
    }
}

/// Line-delimited JSON over a spawned child process. The child is started
/// on first use and kept alive; one request line in, one response line out.
pub struct SubprocessRewriter {
    command: Vec<String>,
    timeout: Duration,
    child: Mutex<Option<ChildIo>>,
}

struct ChildIo {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl SubprocessRewriter {
    pub fn new(command: Vec<String>, timeout: Duration) -> Result<Self> {
        if command.is_empty() {
            return Err(Error::Config("empty rewriter command".into()));
        }
        Ok(SubprocessRewriter {
            command,
            timeout,
            child: Mutex::new(None),
        })
    }

    fn spawn(&self) -> Result<ChildIo> {
        let mut child = Command::new(&self.command[0])
            .args(&self.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Transport(format!("spawn {:?}: {e}", self.command)))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ChildIo {
            child,
            stdin,
            lines: rx,
        })
    }
}

impl Rewriter for SubprocessRewriter {
    fn rewrite(&self, request: &RewriterRequest) -> Result<RewriterResponse> {
        let mut guard = self.child.lock().expect("rewriter lock");
        if guard.is_none() {
            *guard = Some(self.spawn()?);
        }
        let io = guard.as_mut().unwrap();
        let line = serde_json::to_string(request).expect("request serializes");
        let write = io
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| io.stdin.write_all(b"\n"))
            .and_then(|_| io.stdin.flush());
        if let Err(e) = write {
            *guard = None;
            return Err(Error::Transport(format!("rewriter stdin: {e}")));
        }
        match io.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => serde_json::from_str(&line)
                .map_err(|e| Error::Transport(format!("bad rewriter response: {e}"))),
            Ok(Err(e)) => {
                *guard = None;
                Err(Error::Transport(format!("rewriter stdout: {e}")))
            }
            Err(_) => {
                *guard = None;
                Err(Error::Transport(format!(
                    "rewriter timed out after {:?}",
                    self.timeout
                )))
            }
        }
    }

    fn name(&self) -> &str {
        "subprocess-rewriter"
    }
}

impl Drop for SubprocessRewriter {
    fn drop(&mut self) {
        if let Ok(mut guard) = self.child.lock() {
            if let Some(io) = guard.as_mut() {
                let _ = io.child.kill();
                let _ = io.child.wait();
            }
        }
    }
}

/// Single POST with a JSON body to an HTTP endpoint.
pub struct HttpRewriter {
    endpoint: String,
    agent: ureq::Agent,
}

impl HttpRewriter {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        HttpRewriter {
            endpoint: endpoint.into(),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }
}

impl Rewriter for HttpRewriter {
    fn rewrite(&self, request: &RewriterRequest) -> Result<RewriterResponse> {
        let response = self
            .agent
            .post(&self.endpoint)
            .send_json(serde_json::to_value(request).expect("request serializes"))
            .map_err(|e| Error::Transport(format!("POST {}: {e}", self.endpoint)))?;
        response
            .into_json()
            .map_err(|e| Error::Transport(format!("bad rewriter response: {e}")))
    }

    fn name(&self) -> &str {
        "http-rewriter"
    }
}

fn contains_token(tokens: &[String], needle: &str) -> bool {
    tokens.iter().any(|t| t == needle)
}

/// Rewrite one caption and validate the response against the rule set's
/// constraints. The result tokenizes under the fixed vocabulary (unknown
/// words become UNK).
pub fn enrich(
    scene: &EventScene,
    base: &Caption,
    ruleset: &PromptRuleSet,
    client: &dyn Rewriter,
    vocab: &Vocab,
) -> Result<Caption> {
    ruleset.validate()?;
    let request = RewriterRequest {
        ruleset: ruleset.id.clone(),
        caption: base.text.clone(),
        events: EventSummary::from_scene(scene),
    };
    let response = client.rewrite(&request)?;
    if response.text.trim().is_empty() {
        return Err(Error::Content(format!(
            "rewriter {} returned empty text",
            client.name()
        )));
    }

    let words: Vec<String> = response
        .text
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| c.is_ascii_punctuation() && c != '.')
                .trim_end_matches('.')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect();

    if words.len() < ruleset.min_words || words.len() > ruleset.max_words {
        return Err(Error::Content(format!(
            "enriched caption has {} words, rule set {} allows {}..={}",
            words.len(),
            ruleset.id,
            ruleset.min_words,
            ruleset.max_words
        )));
    }

    for event in &request.events {
        if ruleset.mentions(FactField::Class) && !contains_token(&words, &event.class) {
            return Err(Error::Content(format!(
                "enriched caption omits required class '{}'",
                event.class
            )));
        }
        if ruleset.mentions(FactField::Frequency) {
            for f in [event.freq_hz, event.freq_end_hz].into_iter().flatten() {
                if !contains_token(&words, &f.to_string()) {
                    return Err(Error::Content(format!(
                        "enriched caption omits required frequency {f}"
                    )));
                }
            }
        }
        if ruleset.mentions(FactField::Onset)
            && !contains_token(&words, &format!("{:.1}", event.onset_s))
        {
            return Err(Error::Content(format!(
                "enriched caption omits required onset {:.1}",
                event.onset_s
            )));
        }
        if ruleset.mentions(FactField::Duration)
            && !contains_token(&words, &format!("{:.1}", event.duration_s))
        {
            return Err(Error::Content(format!(
                "enriched caption omits required duration {:.1}",
                event.duration_s
            )));
        }
    }

    Ok(Caption::new(response.text, CaptionSource::Enriched, vocab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::captionaug::default_rulesets;
    use crate::synthworld::{base_caption, EventSpec};

    fn tone_scene() -> EventScene {
        EventScene {
            id: 9,
            events: vec![EventSpec {
                class: EventClass::Tone,
                onset: 0.1,
                duration: 0.3,
                freq: 440.0,
                freq_end: 440.0,
                amplitude: 0.5,
            }],
        }
    }

    struct FixedRewriter(&'static str);

    impl Rewriter for FixedRewriter {
        fn rewrite(&self, _: &RewriterRequest) -> Result<RewriterResponse> {
            Ok(RewriterResponse {
                text: self.0.to_string(),
            })
        }
        fn name(&self) -> &str {
            "fixed"
        }
    }

    #[test]
    fn rule_rewriter_mentions_required_fields() {
        let scene = tone_scene();
        let base = base_caption(&scene);
        let rulesets = default_rulesets();
        let full = rulesets.iter().find(|r| r.id == "rs-full").unwrap();
        let client = RuleRewriter::with_defaults();
        let vocab = Vocab::builtin();
        let caption = enrich(&scene, &base, full, &client, vocab).unwrap();
        assert_eq!(caption.source, CaptionSource::Enriched);
        assert_eq!(caption.text, "a steady 400 hertz tone starting at 0.1 seconds lasting 0.3 seconds");
        // in-vocab by construction
        assert!(caption.tokens.iter().all(|&t| t != 0));
    }

    #[test]
    fn missing_frequency_is_content_error() {
        let scene = tone_scene();
        let base = base_caption(&scene);
        let rulesets = default_rulesets();
        let rs = rulesets.iter().find(|r| r.id == "rs-class-freq").unwrap();
        let client = FixedRewriter("a tone plays with no numbers at all");
        match enrich(&scene, &base, rs, &client, Vocab::builtin()) {
            Err(Error::Content(msg)) => assert!(msg.contains("frequency"), "{msg}"),
            other => panic!("expected content error, got {other:?}"),
        }
    }

    #[test]
    fn empty_response_is_content_error() {
        let scene = tone_scene();
        let base = base_caption(&scene);
        let rulesets = default_rulesets();
        let client = FixedRewriter("   ");
        assert!(matches!(
            enrich(&scene, &base, &rulesets[0], &client, Vocab::builtin()),
            Err(Error::Content(_))
        ));
    }

    #[test]
    fn deterministic_rewriter_is_deterministic() {
        let scene = tone_scene();
        let base = base_caption(&scene);
        let rulesets = default_rulesets();
        let client = RuleRewriter::with_defaults();
        let vocab = Vocab::builtin();
        let a = enrich(&scene, &base, &rulesets[2], &client, vocab).unwrap();
        let b = enrich(&scene, &base, &rulesets[2], &client, vocab).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn chirp_phrase_names_both_frequencies() {
        let scene = EventScene {
            id: 10,
            events: vec![EventSpec {
                class: EventClass::Chirp,
                onset: 0.2,
                duration: 0.4,
                freq: 600.0,
                freq_end: 2200.0,
                amplitude: 0.5,
            }],
        };
        let base = base_caption(&scene);
        let rulesets = default_rulesets();
        let client = RuleRewriter::with_defaults();
        let caption = enrich(&scene, &base, &rulesets[1], &client, Vocab::builtin()).unwrap();
        assert!(caption.text.contains("from 600 to 2200 hertz"), "{}", caption.text);
    }
}
