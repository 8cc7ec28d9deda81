// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Task items and the shared-task TSV formats.
//!
//! Gold files carry `context \t target \t ann1 \t ann2 ...`, run files carry
//! `context \t target \t sub1 ... subN` with at most ten substitutes. Both are
//! UTF-8 with `\n` line endings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{fold_char, normalize};

/// Maximum number of substitutes kept per prediction record.
pub const MAX_SUBSTITUTES: usize = 10;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("line {line}: expected at least {expected} tab-separated fields, found {found}")]
    Malformed {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: field {field} is empty")]
    EmptyField { line: usize, field: usize },
    #[error("line {line}: {source}")]
    Span { line: usize, source: SpanError },
    #[error("line {line}: invalid UTF-8")]
    Utf8 { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpanError {
    #[error("empty context or target")]
    Empty,
    #[error("target {target:?} does not occur as a whole token in the context")]
    NotFound { target: String },
}

/// Coarse part-of-speech category used for module routing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosCategory {
    Verb,
    Noun,
    Adj,
    Other,
    Unassigned,
}

impl PosCategory {
    /// The four categories a tagger may return.
    pub const TAGGED: [PosCategory; 4] = [
        PosCategory::Verb,
        PosCategory::Noun,
        PosCategory::Adj,
        PosCategory::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosCategory::Verb => "VERB",
            PosCategory::Noun => "NOUN",
            PosCategory::Adj => "ADJ",
            PosCategory::Other => "OTHER",
            PosCategory::Unassigned => "UNASSIGNED",
        }
    }
}

impl fmt::Display for PosCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "VERB" => Ok(PosCategory::Verb),
            "NOUN" => Ok(PosCategory::Noun),
            "ADJ" => Ok(PosCategory::Adj),
            "OTHER" => Ok(PosCategory::Other),
            "UNASSIGNED" => Ok(PosCategory::Unassigned),
            other => Err(format!("unknown POS category {other:?}")),
        }
    }
}

/// Half-open character span `[start, end)` into a context string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetSpan {
    pub start: usize,
    pub end: usize,
}

impl TargetSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// Converts the character span into a byte range of `context`.
    pub fn byte_range(&self, context: &str) -> Range<usize> {
        let mut indices = context
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(context.len()));
        let start = indices.nth(self.start).unwrap_or(context.len());
        let end = if self.is_empty() {
            start
        } else {
            indices.nth(self.len() - 1).unwrap_or(context.len())
        };
        start..end
    }
}

/// Finds the first case-insensitive occurrence of `target` in `context` that is
/// bounded by non-letters or the string edges.
pub fn locate_target_span(context: &str, target: &str) -> Result<TargetSpan, SpanError> {
    let target = target.trim_matches(|c: char| c.is_ascii_whitespace());
    if context.is_empty() || target.is_empty() {
        return Err(SpanError::Empty);
    }
    let hay: Vec<char> = context.chars().collect();
    let needle: Vec<char> = target.chars().map(fold_char).collect();
    if needle.len() > hay.len() {
        return Err(SpanError::NotFound {
            target: target.to_string(),
        });
    }
    for start in 0..=hay.len() - needle.len() {
        let end = start + needle.len();
        let matches = hay[start..end]
            .iter()
            .zip(&needle)
            .all(|(&h, &n)| fold_char(h) == n);
        if !matches {
            continue;
        }
        let left_ok = start == 0 || !hay[start - 1].is_alphabetic();
        let right_ok = end == hay.len() || !hay[end].is_alphabetic();
        if left_ok && right_ok {
            return Ok(TargetSpan { start, end });
        }
    }
    Err(SpanError::NotFound {
        target: target.to_string(),
    })
}

/// One task item: a sentence with one marked complex word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub context: String,
    pub target: String,
    pub span: TargetSpan,
    pos: PosCategory,
}

impl Instance {
    pub fn new(context: impl Into<String>, target: impl Into<String>) -> Result<Self, SpanError> {
        let context = context.into();
        let target = target.into();
        let span = locate_target_span(&context, &target)?;
        Ok(Instance {
            context,
            target,
            span,
            pos: PosCategory::Unassigned,
        })
    }

    pub fn pos(&self) -> PosCategory {
        self.pos
    }

    /// Records the tagger's category. Only the first assignment sticks; the
    /// returned value is the category in effect afterwards.
    pub fn assign_pos(&mut self, pos: PosCategory) -> PosCategory {
        if self.pos == PosCategory::Unassigned {
            self.pos = pos;
        }
        self.pos
    }

    /// The target exactly as it appears in the context.
    pub fn surface(&self) -> &str {
        &self.context[self.span.byte_range(&self.context)]
    }

    /// Key used to pair run records with gold records.
    pub fn key(&self) -> (&str, &str) {
        (&self.context, &self.target)
    }
}

/// A gold item: the instance plus annotator substitutes. Repeated
/// annotations are votes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldInstance {
    pub instance: Instance,
    pub annotations: Vec<String>,
    /// 1-based source line.
    pub line: usize,
}

impl GoldInstance {
    /// Number of annotations that normalize to `text`.
    pub fn vote_count(&self, text: &str) -> usize {
        let key = normalize(text);
        self.annotations
            .iter()
            .filter(|a| normalize(a) == key)
            .count()
    }

    /// Normalized annotation set.
    pub fn gold_set(&self) -> BTreeSet<String> {
        self.annotations.iter().map(|a| normalize(a)).collect()
    }

    /// Re-serializes the record in gold TSV layout (without line terminator).
    pub fn to_tsv_line(&self) -> String {
        let mut fields = vec![self.instance.context.as_str(), self.instance.target.as_str()];
        fields.extend(self.annotations.iter().map(String::as_str));
        fields.join("\t")
    }
}

/// The annotations with the maximal vote count, normalized. A tie keeps every
/// tied annotation.
pub fn gold_top1_set(gold: &GoldInstance) -> BTreeSet<String> {
    let mut votes: BTreeMap<String, usize> = BTreeMap::new();
    for a in &gold.annotations {
        *votes.entry(normalize(a)).or_default() += 1;
    }
    let max = votes.values().copied().max().unwrap_or(0);
    votes
        .into_iter()
        .filter(|&(_, n)| n == max)
        .map(|(text, _)| text)
        .collect()
}

/// An ordered substitute list for one instance, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub context: String,
    pub target: String,
    substitutes: Vec<String>,
}

impl PredictionRecord {
    /// Builds a record, dropping blank and duplicate substitutes (first
    /// occurrence wins) and keeping at most [`MAX_SUBSTITUTES`]. The flag is
    /// true when the list had to be truncated.
    pub fn new<I, S>(context: impl Into<String>, target: impl Into<String>, subs: I) -> (Self, bool)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = BTreeSet::new();
        let mut substitutes = Vec::new();
        let mut truncated = false;
        for s in subs {
            let s = s.into();
            let key = normalize(&s);
            if key.is_empty() || !seen.insert(key) {
                continue;
            }
            if substitutes.len() == MAX_SUBSTITUTES {
                truncated = true;
                break;
            }
            substitutes.push(s);
        }
        let record = PredictionRecord {
            context: context.into(),
            target: target.into(),
            substitutes,
        };
        (record, truncated)
    }

    pub fn substitutes(&self) -> &[String] {
        &self.substitutes
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.context, &self.target)
    }
}

/// Result of parsing a run file.
#[derive(Debug, Clone, Default)]
pub struct RunFile {
    pub records: Vec<PredictionRecord>,
    /// Lines whose substitute list exceeded the cap.
    pub truncated: usize,
}

/// Iterates `(line_number, text)` over non-blank lines, checking UTF-8 per line.
fn tsv_lines<R: BufRead>(mut reader: R) -> impl Iterator<Item = Result<(usize, String), DataError>> {
    let mut line_no = 0usize;
    let mut buf = Vec::new();
    std::iter::from_fn(move || loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => return None,
            Ok(_) => {}
            Err(e) => return Some(Err(DataError::Io(e))),
        }
        line_no += 1;
        while matches!(buf.last(), Some(b'\n' | b'\r')) {
            buf.pop();
        }
        let text = match String::from_utf8(std::mem::take(&mut buf)) {
            Ok(t) => t,
            Err(_) => return Some(Err(DataError::Utf8 { line: line_no })),
        };
        if text.trim().is_empty() {
            continue;
        }
        return Some(Ok((line_no, text)));
    })
}

fn split_fields(line: usize, text: &str, expected: usize) -> Result<Vec<&str>, DataError> {
    let fields: Vec<&str> = text.split('\t').collect();
    if fields.len() < expected {
        return Err(DataError::Malformed {
            line,
            expected,
            found: fields.len(),
        });
    }
    Ok(fields)
}

fn make_instance(line: usize, context: &str, target: &str) -> Result<Instance, DataError> {
    Instance::new(context, target).map_err(|source| DataError::Span { line, source })
}

/// Parses a gold TSV file.
pub fn parse_gold_tsv<R: BufRead>(reader: R) -> Result<Vec<GoldInstance>, DataError> {
    let mut out = Vec::new();
    for item in tsv_lines(reader) {
        let (line, text) = item?;
        let fields = split_fields(line, &text, 3)?;
        for (i, f) in fields.iter().enumerate().skip(2) {
            if f.trim().is_empty() {
                return Err(DataError::EmptyField { line, field: i + 1 });
            }
        }
        let instance = make_instance(line, fields[0], fields[1])?;
        out.push(GoldInstance {
            instance,
            annotations: fields[2..].iter().map(|s| s.to_string()).collect(),
            line,
        });
    }
    Ok(out)
}

/// Parses a run (prediction) TSV file. Zero substitutes are allowed.
pub fn parse_run_tsv<R: BufRead>(reader: R) -> Result<RunFile, DataError> {
    let mut run = RunFile::default();
    for item in tsv_lines(reader) {
        let (line, text) = item?;
        let fields = split_fields(line, &text, 2)?;
        let (record, truncated) =
            PredictionRecord::new(fields[0], fields[1], fields[2..].iter().copied());
        if truncated {
            log::warn!("line {line}: more than {MAX_SUBSTITUTES} substitutes, extra dropped");
            run.truncated += 1;
        }
        run.records.push(record);
    }
    Ok(run)
}

/// Parses an input dataset: `context \t target [\t ...]`. Extra columns (for
/// example gold annotations) are ignored.
pub fn parse_dataset_tsv<R: BufRead>(reader: R) -> Result<Vec<Instance>, DataError> {
    let mut out = Vec::new();
    for item in tsv_lines(reader) {
        let (line, text) = item?;
        let fields = split_fields(line, &text, 2)?;
        out.push(make_instance(line, fields[0], fields[1])?);
    }
    Ok(out)
}

/// Writes records in run TSV layout.
pub fn write_run_tsv<W: Write>(records: &[PredictionRecord], mut sink: W) -> io::Result<()> {
    for r in records {
        sink.write_all(r.context.as_bytes())?;
        sink.write_all(b"\t")?;
        sink.write_all(r.target.as_bytes())?;
        for s in &r.substitutes {
            sink.write_all(b"\t")?;
            sink.write_all(s.as_bytes())?;
        }
        sink.write_all(b"\n")?;
    }
    sink.flush()
}
