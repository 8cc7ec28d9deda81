// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Target POS tagging and the POS → candidate-module routing table.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Instance, PosCategory, TargetSpan};
use crate::text::normalize;

const BUNDLED_LEXICON: &str = include_str!("../resources/pos_lexicon.tsv");

/// A candidate-generation module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModuleId {
    Vsd,
    Ppdb,
    Mlm,
    Kg,
}

impl ModuleId {
    /// All modules, in the fixed aggregation order.
    pub const ALL: [ModuleId; 4] = [ModuleId::Vsd, ModuleId::Ppdb, ModuleId::Mlm, ModuleId::Kg];

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleId::Vsd => "VSD",
            ModuleId::Ppdb => "PPDB",
            ModuleId::Mlm => "MLM",
            ModuleId::Kg => "KG",
        }
    }
}

impl fmt::Display for ModuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "vsd" => Ok(ModuleId::Vsd),
            "ppdb" => Ok(ModuleId::Ppdb),
            "mlm" => Ok(ModuleId::Mlm),
            "kg" => Ok(ModuleId::Kg),
            other => Err(format!("unknown module {other:?} (expected vsd, ppdb, mlm or kg)")),
        }
    }
}

/// Parses a comma-separated module list such as `ppdb,mlm`.
pub fn parse_module_list(s: &str) -> Result<Vec<ModuleId>, String> {
    let mut out: Vec<ModuleId> = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoutingProfile {
    /// The per-POS routing table: verbs skip the knowledge graph.
    #[default]
    Table1,
    /// The pseudocode reading: verbs use all four modules.
    Algorithm1,
    Custom,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("routing for {0} must name at least one module")]
    EmptyRow(PosCategory),
    #[error("routing table has no row for {0}")]
    MissingRow(PosCategory),
}

/// POS category → ordered module set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingConfig {
    table: BTreeMap<PosCategory, Vec<ModuleId>>,
}

impl RoutingConfig {
    pub fn table1() -> Self {
        use ModuleId::*;
        let table = BTreeMap::from([
            (PosCategory::Verb, vec![Vsd, Ppdb, Mlm]),
            (PosCategory::Noun, vec![Ppdb, Mlm, Kg]),
            (PosCategory::Adj, vec![Ppdb, Mlm]),
            (PosCategory::Other, vec![Ppdb, Mlm]),
        ]);
        RoutingConfig { table }
    }

    pub fn algorithm1() -> Self {
        let mut cfg = Self::table1();
        cfg.table
            .insert(PosCategory::Verb, ModuleId::ALL.to_vec());
        cfg
    }

    /// Builds a custom table. VERB, NOUN and ADJ rows must be present and
    /// non-empty; a missing OTHER row falls back to `{PPDB, MLM}`.
    pub fn custom(rows: BTreeMap<PosCategory, Vec<ModuleId>>) -> Result<Self, RoutingError> {
        let mut table = BTreeMap::new();
        for pos in [PosCategory::Verb, PosCategory::Noun, PosCategory::Adj] {
            let row = rows.get(&pos).ok_or(RoutingError::MissingRow(pos))?;
            if row.is_empty() {
                return Err(RoutingError::EmptyRow(pos));
            }
            table.insert(pos, ordered(row));
        }
        let other = rows
            .get(&PosCategory::Other)
            .map(|r| ordered(r))
            .unwrap_or_else(|| vec![ModuleId::Ppdb, ModuleId::Mlm]);
        table.insert(PosCategory::Other, other);
        Ok(RoutingConfig { table })
    }

    pub fn for_profile(
        profile: RoutingProfile,
        custom: Option<BTreeMap<PosCategory, Vec<ModuleId>>>,
    ) -> Result<Self, RoutingError> {
        match profile {
            RoutingProfile::Table1 => Ok(Self::table1()),
            RoutingProfile::Algorithm1 => Ok(Self::algorithm1()),
            RoutingProfile::Custom => Self::custom(custom.unwrap_or_default()),
        }
    }

    /// Every module that any row routes to.
    pub fn all_routed(&self) -> Vec<ModuleId> {
        let mut all: Vec<ModuleId> = self.table.values().flatten().copied().collect();
        all.sort();
        all.dedup();
        all
    }
}

impl Default for RoutingConfig {
    fn default() -> Self {
        Self::table1()
    }
}

fn ordered(row: &[ModuleId]) -> Vec<ModuleId> {
    let mut row = row.to_vec();
    row.sort();
    row.dedup();
    row
}

/// Modules to run for a target of category `pos`. Unassigned targets are
/// routed like OTHER.
pub fn modules_for_pos(pos: PosCategory, cfg: &RoutingConfig) -> Vec<ModuleId> {
    let key = match pos {
        PosCategory::Unassigned => PosCategory::Other,
        p => p,
    };
    cfg.table.get(&key).cloned().unwrap_or_default()
}

/// Assigns a category to the target of an instance given its context.
pub trait ContextualPosTagger: Send + Sync {
    /// Must always return one of VERB, NOUN, ADJ or OTHER.
    fn tag(&self, context: &str, span: TargetSpan) -> PosCategory;
}

/// Tags the instance once; an already tagged instance keeps its category.
pub fn tag_target_pos(instance: &mut Instance, tagger: &dyn ContextualPosTagger) -> PosCategory {
    if instance.pos() != PosCategory::Unassigned {
        return instance.pos();
    }
    let pos = match tagger.tag(&instance.context, instance.span) {
        PosCategory::Unassigned => PosCategory::Other,
        p => p,
    };
    instance.assign_pos(pos)
}

/// Word → coarse categories, most likely first.
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    entries: HashMap<String, Vec<PosCategory>>,
}

impl PosLexicon {
    /// The lexicon compiled into the crate (about 50k words).
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON.as_bytes()).expect("bundled POS lexicon is well-formed")
    }

    /// Reads `word \t CAT[,CAT...]` lines.
    pub fn parse<R: BufRead>(reader: R) -> io::Result<Self> {
        let mut entries = HashMap::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, cats) = line.split_once('\t').ok_or_else(|| {
                io::Error::new(io::ErrorKind::InvalidData, format!("line {}: missing tab", i + 1))
            })?;
            let cats = cats
                .split(',')
                .map(|c| c.parse::<PosCategory>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1)))?;
            entries.insert(normalize(word), cats);
        }
        Ok(PosLexicon { entries })
    }

    pub fn from_entries<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = (S, Vec<PosCategory>)>,
        S: AsRef<str>,
    {
        PosLexicon {
            entries: entries
                .into_iter()
                .map(|(w, c)| (normalize(w.as_ref()), c))
                .collect(),
        }
    }

    pub fn categories(&self, word: &str) -> &[PosCategory] {
        self.entries.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has(&self, word: &str, pos: PosCategory) -> bool {
        self.categories(word).contains(&pos)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

const VERB_CUES: &[&str] = &[
    "to", "will", "would", "can", "could", "shall", "should", "may", "might", "must", "i", "we",
    "they", "you", "he", "she", "who", "not", "never", "don't", "didn't", "doesn't", "cannot",
    "won't", "can't",
];
const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our",
    "their", "some", "any", "every", "each", "no", "another", "such",
];
const COPULAS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "very", "so", "too", "quite",
    "rather", "more", "most", "less", "least", "seem", "seems", "seemed", "become", "becomes",
    "became", "remain", "remains", "remained",
];
const NOUN_SUFFIXES: &[&str] = &[
    "tion", "sion", "ment", "ness", "ity", "ism", "ist", "ance", "ence", "ship", "hood",
];
const ADJ_SUFFIXES: &[&str] = &["ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish", "ary"];
const VERB_SUFFIXES: &[&str] = &["ize", "ise", "ify", "ate"];

/// Closed-lexicon tagger with suffix heuristics and a few context cues.
///
/// Unambiguous words get their lexicon category. Ambiguous words are
/// resolved by the neighbouring tokens, then by the lexicon's first (most
/// likely) category.
#[derive(Debug, Clone)]
pub struct LexiconTagger {
    lexicon: Arc<PosLexicon>,
}

impl LexiconTagger {
    pub fn new(lexicon: Arc<PosLexicon>) -> Self {
        LexiconTagger { lexicon }
    }

    pub fn bundled() -> Self {
        Self::new(Arc::new(PosLexicon::bundled()))
    }

    pub fn lexicon(&self) -> &Arc<PosLexicon> {
        &self.lexicon
    }

    fn word_categories(&self, word: &str) -> Vec<PosCategory> {
        let known = self.lexicon.categories(word);
        if !known.is_empty() {
            return known.to_vec();
        }
        // inflected forms of known stems
        let lex = &self.lexicon;
        let stems = |suffix: &str| -> Vec<String> {
            word.strip_suffix(suffix)
                .filter(|s| s.len() >= 2)
                .map(|s| {
                    let mut v = vec![s.to_string(), format!("{s}e")];
                    let b = s.as_bytes();
                    if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                        v.push(s[..s.len() - 1].to_string());
                    }
                    v
                })
                .unwrap_or_default()
        };
        for suffix in ["ing", "ed"] {
            if stems(suffix).iter().any(|s| lex.has(s, PosCategory::Verb)) {
                return vec![PosCategory::Verb];
            }
        }
        for suffix in ["est", "er"] {
            if stems(suffix).iter().any(|s| lex.has(s, PosCategory::Adj)) {
                return vec![PosCategory::Adj];
            }
        }
        if let Some(stem) = word.strip_suffix('s') {
            let cats: Vec<PosCategory> = lex
                .categories(stem)
                .iter()
                .copied()
                .filter(|c| matches!(c, PosCategory::Noun | PosCategory::Verb))
                .collect();
            if !cats.is_empty() {
                return cats;
            }
        }
        if word.chars().count() >= 5 {
            let has = |list: &[&str]| list.iter().any(|s| word.ends_with(s));
            if word.ends_with("ly") {
                return vec![PosCategory::Other];
            }
            if has(NOUN_SUFFIXES) {
                return vec![PosCategory::Noun];
            }
            if has(ADJ_SUFFIXES) {
                return vec![PosCategory::Adj];
            }
            if has(VERB_SUFFIXES) {
                return vec![PosCategory::Verb];
            }
        }
        Vec::new()
    }
}

fn word_tokens(s: &str) -> Vec<String> {
    s.split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|t| !t.is_empty())
        .map(normalize)
        .collect()
}

impl ContextualPosTagger for LexiconTagger {
    fn tag(&self, context: &str, span: TargetSpan) -> PosCategory {
        let range = span.byte_range(context);
        let surface = normalize(&context[range.clone()]);
        let head = surface.split_whitespace().next().unwrap_or("");
        let cats = self.word_categories(head);
        match cats.len() {
            0 => return PosCategory::Other,
            1 => return cats[0],
            _ => {}
        }
        let can = |p: PosCategory| cats.contains(&p);
        let prev = word_tokens(&context[..range.start]).pop();
        let next = word_tokens(&context[range.end..]).into_iter().next();
        let prev = prev.as_deref().unwrap_or("");
        let next_is_noun = next
            .as_deref()
            .is_some_and(|n| self.lexicon.categories(n).first() == Some(&PosCategory::Noun));
        let verbal_shape = head.ends_with("ing") || head.ends_with("ed");

        if VERB_CUES.contains(&prev) && can(PosCategory::Verb) {
            return PosCategory::Verb;
        }
        if DETERMINERS.contains(&prev) {
            if can(PosCategory::Adj) && next_is_noun {
                return PosCategory::Adj;
            }
            if can(PosCategory::Noun) {
                return PosCategory::Noun;
            }
            if can(PosCategory::Adj) {
                return PosCategory::Adj;
            }
        }
        if COPULAS.contains(&prev) {
            if verbal_shape && can(PosCategory::Verb) {
                return PosCategory::Verb;
            }
            if can(PosCategory::Adj) {
                return PosCategory::Adj;
            }
        }
        if verbal_shape && can(PosCategory::Verb) {
            return PosCategory::Verb;
        }
        let prev_is_noun = self.lexicon.categories(prev).first() == Some(&PosCategory::Noun);
        if prev_is_noun && can(PosCategory::Verb) && !next_is_noun {
            return PosCategory::Verb;
        }
        if can(PosCategory::Adj) && next_is_noun {
            return PosCategory::Adj;
        }
        cats[0]
    }
}

/// Adapter for an external tagger process.
///
/// The command is spawned once per call and receives one line on stdin:
/// `context \t start \t end` (character offsets). It must print one category
/// name. Any failure yields OTHER.
#[derive(Debug, Clone)]
pub struct ProcessTagger {
    program: String,
    args: Vec<String>,
}

impl ProcessTagger {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        ProcessTagger {
            program: program.into(),
            args,
        }
    }

    fn run(&self, context: &str, span: TargetSpan) -> io::Result<PosCategory> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        if let Some(mut stdin) = child.stdin.take() {
            writeln!(stdin, "{}\t{}\t{}", context, span.start, span.end)?;
        }
        let out = child.wait_with_output()?;
        let text = String::from_utf8_lossy(&out.stdout);
        text.trim()
            .parse::<PosCategory>()
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

impl ContextualPosTagger for ProcessTagger {
    fn tag(&self, context: &str, span: TargetSpan) -> PosCategory {
        match self.run(context, span) {
            Ok(PosCategory::Unassigned) => PosCategory::Other,
            Ok(p) => p,
            Err(e) => {
                log::warn!("external tagger failed: {e}");
                PosCategory::Other
            }
        }
    }
}
