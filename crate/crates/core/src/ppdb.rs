// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Paraphrase-database lexical packages.
//!
//! Records look like
//! `[JJ] ||| big ||| large ||| PPDB2.0Score=5.1 ... ||| 0-0 ||| Equivalence`.
//! Quality is the `PPDB2.0Score` feature.

use std::collections::HashMap;
use std::io::{self, BufRead};

use thiserror::Error;

use crate::candidate::Candidate;
use crate::data::PosCategory;
use crate::pos::ModuleId;
use crate::text::normalize;

pub const FIELD_DELIMITER: &str = " ||| ";
pub const QUALITY_FEATURE: &str = "PPDB2.0Score";

#[derive(Debug, Error)]
pub enum PpdbError {
    #[error("cannot read paraphrase file: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParaphraseEntry {
    pub source: String,
    pub target: String,
    pub syntactic_tag: String,
    pub quality: f64,
    pub entailment: String,
}

/// Load statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PpdbReport {
    pub lines: usize,
    pub entries: usize,
    /// Lines with fewer than six fields (or an unusable score).
    pub skipped: usize,
    /// Lines without a quality feature; they get quality 0.
    pub missing_score: usize,
    /// Self-paraphrases dropped.
    pub identity: usize,
    pub duplicates: usize,
}

impl PpdbReport {
    /// Share of non-blank lines that were skipped.
    pub fn skip_ratio(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.skipped as f64 / self.lines as f64
        }
    }
}

/// Normalized source → entries, best quality first. A target may appear
/// once per syntactic tag.
#[derive(Debug, Clone, Default)]
pub struct ParaphraseIndex {
    by_source: HashMap<String, Vec<ParaphraseEntry>>,
}

fn parse_line(line: &str) -> Option<(ParaphraseEntry, bool)> {
    let fields: Vec<&str> = line.split(FIELD_DELIMITER).collect();
    if fields.len() < 6 {
        return None;
    }
    let mut quality = None;
    for feature in fields[3].split_whitespace() {
        if let Some(v) = feature.strip_prefix(QUALITY_FEATURE).and_then(|r| r.strip_prefix('=')) {
            quality = Some(v.parse::<f64>().ok().filter(|q| q.is_finite())?);
        }
    }
    let entry = ParaphraseEntry {
        source: normalize(fields[1]),
        target: normalize(fields[2]),
        syntactic_tag: fields[0].trim().to_string(),
        quality: quality.unwrap_or(0.0),
        entailment: fields[5].trim().to_string(),
    };
    Some((entry, quality.is_none()))
}

impl ParaphraseIndex {
    pub fn load<R: BufRead>(reader: R) -> Result<(Self, PpdbReport), PpdbError> {
        let mut report = PpdbReport::default();
        let mut by_source: HashMap<String, Vec<ParaphraseEntry>> = HashMap::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            report.lines += 1;
            let Some((entry, missing)) = parse_line(&line) else {
                report.skipped += 1;
                continue;
            };
            if entry.source.is_empty() || entry.target.is_empty() {
                report.skipped += 1;
                continue;
            }
            if entry.source == entry.target {
                report.identity += 1;
                continue;
            }
            report.missing_score += usize::from(missing);
            let list = by_source.entry(entry.source.clone()).or_default();
            match list
                .iter_mut()
                .find(|e| e.target == entry.target && e.syntactic_tag == entry.syntactic_tag)
            {
                Some(existing) => {
                    report.duplicates += 1;
                    if entry.quality > existing.quality {
                        *existing = entry;
                    }
                }
                None => list.push(entry),
            }
        }
        for list in by_source.values_mut() {
            list.sort_by(|a, b| {
                b.quality
                    .total_cmp(&a.quality)
                    .then_with(|| a.target.cmp(&b.target))
            });
        }
        report.entries = by_source.values().map(Vec::len).sum();
        if report.lines == 0 {
            log::warn!("paraphrase file is empty");
        } else if report.skipped > 0 {
            log::warn!("skipped {} malformed paraphrase lines", report.skipped);
        }
        Ok((ParaphraseIndex { by_source }, report))
    }

    pub fn entries(&self, word: &str) -> &[ParaphraseEntry] {
        self.by_source.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn sources(&self) -> usize {
        self.by_source.len()
    }

    pub fn len(&self) -> usize {
        self.by_source.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_source.is_empty()
    }
}

/// Coarse tag compatibility: nouns `[N…`, adjectives `[J…`, verbs `[V…`.
/// OTHER accepts every tag.
pub fn tag_compatible(tag: &str, pos: PosCategory) -> bool {
    let prefix = match pos {
        PosCategory::Noun => "[N",
        PosCategory::Adj => "[J",
        PosCategory::Verb => "[V",
        PosCategory::Other | PosCategory::Unassigned => return true,
    };
    tag.starts_with(prefix)
}

/// Best `limit` paraphrases of `word` compatible with `pos`.
pub fn paraphrases_for(
    idx: &ParaphraseIndex,
    word: &str,
    pos: PosCategory,
    limit: usize,
) -> Vec<Candidate> {
    let word = normalize(word);
    let mut seen = std::collections::HashSet::new();
    idx.entries(&word)
        .iter()
        .filter(|e| tag_compatible(&e.syntactic_tag, pos) && e.target != word)
        .filter(|e| seen.insert(e.target.as_str()))
        .take(limit)
        .map(|e| Candidate::from_lemma(e.target.clone(), ModuleId::Ppdb, e.quality))
        .collect()
}
