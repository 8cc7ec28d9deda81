// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Masked-language-model access.
//!
//! A [`MaskedLmScorer`] does two jobs: propose fillers for a masked slot
//! (`generate`) and score given fillers in that slot (`score`). The ranking
//! helper [`fill_rank`] sorts scored fillers best first. Scores are natural
//! logs so multiword fillers add up.

mod remote;
mod stub;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::data::Instance;
use crate::pos::ModuleId;
use crate::text::{is_alphabetic_word, normalize};

pub use remote::{RemoteConfig, RemoteScorer};
pub use stub::{stub_score, UnigramScorer, UnigramTableError};

#[derive(Debug, Error)]
pub enum MlmError {
    #[error("scorer transport error: {0}")]
    Transport(String),
    #[error("scorer returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("scorer response violates the protocol: {0}")]
    Schema(String),
}

/// The context split around the masked target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedContext {
    pub left: String,
    pub right: String,
    /// The masked-out surface form.
    pub original: String,
}

impl MaskedContext {
    pub fn reconstruct(&self) -> String {
        format!("{}{}{}", self.left, self.original, self.right)
    }

    /// The context with `filler` in the slot.
    pub fn fill(&self, filler: &str) -> String {
        format!("{}{}{}", self.left, filler, self.right)
    }
}

pub fn make_masked_context(instance: &Instance) -> MaskedContext {
    let range = instance.span.byte_range(&instance.context);
    MaskedContext {
        left: instance.context[..range.start].to_string(),
        original: instance.context[range.clone()].to_string(),
        right: instance.context[range.end..].to_string(),
    }
}

/// A filler text with its log-domain score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredText {
    pub text: String,
    pub log_prob: f64,
}

impl ScoredText {
    pub fn new(text: impl Into<String>, log_prob: f64) -> Self {
        ScoredText {
            text: text.into(),
            log_prob,
        }
    }
}

/// Masked-LM backend. Implementations must be deterministic and safe to call
/// from several threads at once.
pub trait MaskedLmScorer: Send + Sync {
    /// At most `top_n` fillers, best first.
    fn generate(&self, ctx: &MaskedContext, top_n: usize) -> Result<Vec<ScoredText>, MlmError>;

    /// One score per input text, in input order.
    fn score(&self, ctx: &MaskedContext, texts: &[String]) -> Result<Vec<ScoredText>, MlmError>;
}

/// Descending by score, ties by text.
fn by_score_desc(a: &ScoredText, b: &ScoredText) -> Ordering {
    b.log_prob
        .total_cmp(&a.log_prob)
        .then_with(|| a.text.cmp(&b.text))
}

/// Scores `texts` in the slot and orders them best first, ties broken by text.
pub fn fill_rank(
    scorer: &dyn MaskedLmScorer,
    ctx: &MaskedContext,
    texts: &[String],
) -> Result<Vec<ScoredText>, MlmError> {
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let mut scored = scorer.score(ctx, texts)?;
    if scored.len() != texts.len() {
        return Err(MlmError::Schema(format!(
            "{} scores for {} texts",
            scored.len(),
            texts.len()
        )));
    }
    if let Some(bad) = scored.iter().find(|s| !s.log_prob.is_finite()) {
        return Err(MlmError::Schema(format!("non-finite score for {:?}", bad.text)));
    }
    scored.sort_by(by_score_desc);
    Ok(scored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateConfig {
    /// Fillers requested from the backend before filtering.
    pub top_n: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig { top_n: 30 }
    }
}

/// Word-piece continuation marker.
const CONTINUATION_MARKER: &str = "##";
/// Word-initial markers used by byte-level BPE and sentencepiece vocabularies.
const WORD_START_MARKERS: [char; 2] = ['\u{120}', '\u{2581}'];

/// Asks the scorer for fillers and keeps usable words: alphabetic, at least
/// two characters, and different from the original surface and its lemma.
/// Continuation pieces are dropped.
pub fn generate_fill_candidates(
    scorer: &dyn MaskedLmScorer,
    ctx: &MaskedContext,
    cfg: &GenerateConfig,
    original_lemma: Option<&str>,
) -> Result<Vec<Candidate>, MlmError> {
    let original = normalize(&ctx.original);
    let lemma = original_lemma.map(normalize);
    let generated = scorer.generate(ctx, cfg.top_n.max(1))?;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for item in generated {
        if item.text.starts_with(CONTINUATION_MARKER) {
            continue;
        }
        let text = item.text.trim_start_matches(WORD_START_MARKERS).trim();
        let key = normalize(text);
        if !is_alphabetic_word(text)
            || text.chars().count() < 2
            || key == original
            || lemma.as_deref() == Some(key.as_str())
            || !seen.insert(key.clone())
        {
            continue;
        }
        out.push(Candidate::new(key.clone(), key, ModuleId::Mlm, item.log_prob));
    }
    Ok(out)
}
