// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::io::{self, BufRead};

use thiserror::Error;

use super::{by_score_desc, MaskedContext, MaskedLmScorer, MlmError, ScoredText};
use crate::text::normalize;

const BUNDLED_COUNTS: &str = include_str!("../../resources/unigram_counts.tsv");

#[derive(Debug, Error)]
pub enum UnigramTableError {
    #[error("line {line}: expected `word \\t count`")]
    Malformed { line: usize },
    #[error("unigram table has zero total count")]
    Empty,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Context-free scorer over an add-one smoothed unigram table.
///
/// `score(w) = Σ ln((count(tok) + 1) / (T + V))` over the whitespace tokens of
/// `w`, where `T` is the total count and `V` the vocabulary size. Generation
/// returns the most frequent words regardless of context.
#[derive(Debug, Clone)]
pub struct UnigramScorer {
    counts: HashMap<String, u64>,
    denominator: f64,
    ranked: Vec<ScoredText>,
}

impl UnigramScorer {
    pub fn from_counts<I, S>(counts: I) -> Result<Self, UnigramTableError>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut table: HashMap<String, u64> = HashMap::new();
        for (w, c) in counts {
            *table.entry(normalize(w.as_ref())).or_default() += c;
        }
        let total: u64 = table.values().sum();
        if total == 0 {
            return Err(UnigramTableError::Empty);
        }
        let denominator = (total + table.len() as u64) as f64;
        let mut ranked: Vec<ScoredText> = table
            .iter()
            .map(|(w, &c)| ScoredText::new(w.clone(), ((c + 1) as f64 / denominator).ln()))
            .collect();
        ranked.sort_by(by_score_desc);
        Ok(UnigramScorer {
            counts: table,
            denominator,
            ranked,
        })
    }

    /// Reads `word \t count` lines.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, UnigramTableError> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed = line
                .split_once('\t')
                .and_then(|(w, c)| c.trim().parse::<u64>().ok().map(|c| (w.to_string(), c)));
            rows.push(parsed.ok_or(UnigramTableError::Malformed { line: i + 1 })?);
        }
        Self::from_counts(rows)
    }

    /// The 20k-word table compiled into the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_COUNTS.as_bytes()).expect("bundled unigram table is well-formed")
    }

    pub fn vocabulary_size(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn log_prob(&self, text: &str) -> f64 {
        text.split_whitespace()
            .map(|tok| ((self.count(&normalize(tok)) + 1) as f64 / self.denominator).ln())
            .sum()
    }
}

/// Smoothed unigram log-probability of `text`.
pub fn stub_score(scorer: &UnigramScorer, text: &str) -> f64 {
    scorer.log_prob(text)
}

impl MaskedLmScorer for UnigramScorer {
    fn generate(&self, _ctx: &MaskedContext, top_n: usize) -> Result<Vec<ScoredText>, MlmError> {
        Ok(self.ranked.iter().take(top_n).cloned().collect())
    }

    fn score(&self, _ctx: &MaskedContext, texts: &[String]) -> Result<Vec<ScoredText>, MlmError> {
        Ok(texts
            .iter()
            .map(|t| ScoredText::new(t.clone(), self.log_prob(t)))
            .collect())
    }
}
