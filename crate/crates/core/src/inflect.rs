// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Rule-based English inflection with an irregular-forms table.
//!
//! [`Inflector::detect_form`] maps a surface to `(lemma, form)`;
//! [`Inflector::inflect_to`] goes the other way. Regular rules cover
//! consonant doubling for CVC monosyllables, e-drop and y→i. Detection
//! reverses the rules and keeps only reversals that regenerate the surface,
//! preferring lemmas the POS lexicon knows.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::data::PosCategory;
use crate::pos::PosLexicon;
use crate::text::normalize;

const BUNDLED_IRREGULARS: &str = include_str!("../resources/irregulars.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InflectionForm {
    Base,
    ThirdSg,
    Past,
    Gerund,
    PastPart,
    Singular,
    Plural,
    Positive,
    Comparative,
    Superlative,
    Unknown,
}

impl InflectionForm {
    pub const ALL: [InflectionForm; 11] = [
        InflectionForm::Base,
        InflectionForm::ThirdSg,
        InflectionForm::Past,
        InflectionForm::Gerund,
        InflectionForm::PastPart,
        InflectionForm::Singular,
        InflectionForm::Plural,
        InflectionForm::Positive,
        InflectionForm::Comparative,
        InflectionForm::Superlative,
        InflectionForm::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InflectionForm::Base => "BASE",
            InflectionForm::ThirdSg => "THIRD_SG",
            InflectionForm::Past => "PAST",
            InflectionForm::Gerund => "GERUND",
            InflectionForm::PastPart => "PAST_PART",
            InflectionForm::Singular => "SINGULAR",
            InflectionForm::Plural => "PLURAL",
            InflectionForm::Positive => "POSITIVE",
            InflectionForm::Comparative => "COMPARATIVE",
            InflectionForm::Superlative => "SUPERLATIVE",
            InflectionForm::Unknown => "UNKNOWN",
        }
    }

    /// The POS category the form belongs to (OTHER for UNKNOWN).
    pub fn category(self) -> PosCategory {
        use InflectionForm::*;
        match self {
            Base | ThirdSg | Past | Gerund | PastPart => PosCategory::Verb,
            Singular | Plural => PosCategory::Noun,
            Positive | Comparative | Superlative => PosCategory::Adj,
            Unknown => PosCategory::Other,
        }
    }

    /// Uninflected form for a category.
    pub fn base_for(pos: PosCategory) -> InflectionForm {
        match pos {
            PosCategory::Verb => InflectionForm::Base,
            PosCategory::Noun => InflectionForm::Singular,
            PosCategory::Adj => InflectionForm::Positive,
            _ => InflectionForm::Unknown,
        }
    }

    pub fn is_base(self) -> bool {
        matches!(
            self,
            InflectionForm::Base | InflectionForm::Singular | InflectionForm::Positive
        )
    }
}

impl Serialize for InflectionForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Display for InflectionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InflectionForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InflectionForm::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown inflection form {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum IrregularTableError {
    #[error("line {line}: expected `lemma \\t form \\t surface`")]
    Malformed { line: usize },
    #[error("line {line}: {message}")]
    BadForm { line: usize, message: String },
    #[error("line {line}: conflicting entry for ({lemma}, {form})")]
    Conflict {
        line: usize,
        lemma: String,
        form: InflectionForm,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Forward `(lemma, form) → surface` map and its inverse.
#[derive(Debug, Clone, Default)]
pub struct IrregularTable {
    forward: HashMap<(String, InflectionForm), String>,
    inverse: HashMap<String, Vec<(String, InflectionForm)>>,
}

impl IrregularTable {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_IRREGULARS.as_bytes()).expect("bundled irregular table is well-formed")
    }

    /// Reads `lemma \t FORM \t surface` lines. `#` starts a comment line.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self, IrregularTableError> {
        let mut table = IrregularTable::default();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [lemma, form, surface] = fields[..] else {
                return Err(IrregularTableError::Malformed { line: line_no });
            };
            let form: InflectionForm = form.parse().map_err(|message| IrregularTableError::BadForm {
                line: line_no,
                message,
            })?;
            if !table.insert(lemma, form, surface) {
                return Err(IrregularTableError::Conflict {
                    line: line_no,
                    lemma: lemma.to_string(),
                    form,
                });
            }
        }
        Ok(table)
    }

    /// Adds an entry; false when `(lemma, form)` already maps elsewhere.
    pub fn insert(&mut self, lemma: &str, form: InflectionForm, surface: &str) -> bool {
        let lemma = normalize(lemma);
        let surface = normalize(surface);
        let key = (lemma.clone(), form);
        if let Some(existing) = self.forward.get(&key) {
            return *existing == surface;
        }
        self.forward.insert(key, surface.clone());
        if surface != lemma {
            let slot = self.inverse.entry(surface).or_default();
            slot.push((lemma, form));
            slot.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        }
        true
    }

    pub fn lookup(&self, lemma: &str, form: InflectionForm) -> Option<&str> {
        self.forward
            .get(&(lemma.to_string(), form))
            .map(String::as_str)
    }

    /// Every `(lemma, form)` whose irregular surface is `surface`, excluding
    /// identity entries such as `(cut, PAST) → cut`.
    pub fn analyses(&self, surface: &str) -> &[(String, InflectionForm)] {
        self.inverse.get(surface).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    fn entries(&self) -> impl Iterator<Item = (&str, InflectionForm, &str)> {
        self.forward
            .iter()
            .map(|((l, f), s)| (l.as_str(), *f, s.as_str()))
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Vowel-group count, `y` counting as a vowel.
pub fn syllables(word: &str) -> usize {
    let mut groups = 0;
    let mut in_group = false;
    for c in word.bytes() {
        let v = is_vowel(c) || c == b'y';
        if v && !in_group {
            groups += 1;
        }
        in_group = v;
    }
    groups
}

fn is_cvc(w: &[u8]) -> bool {
    let n = w.len();
    if n < 3 {
        return false;
    }
    let (a, b, c) = (w[n - 3], w[n - 2], w[n - 1]);
    !is_vowel(a)
        && is_vowel(b)
        && !is_vowel(c)
        && !matches!(c, b'w' | b'x' | b'y')
        && syllables(std::str::from_utf8(w).unwrap_or("")) == 1
}

fn consonant_y(w: &[u8]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == b'y' && !is_vowel(w[n - 2])
}

fn sibilant(w: &str) -> bool {
    ["s", "x", "z", "ch", "sh"].iter().any(|s| w.ends_with(s))
}

/// Regular-rule inflection of a single lowercase token.
fn regular(word: &str, form: InflectionForm) -> String {
    use InflectionForm::*;
    let w = word.as_bytes();
    let stem_y = || &word[..word.len() - 1];
    let doubled = |suffix: &str| format!("{word}{}{suffix}", &word[word.len() - 1..]);
    match form {
        Base | Singular | Positive | Unknown => word.to_string(),
        ThirdSg | Plural => {
            if sibilant(word) || (form == ThirdSg && word.ends_with('o')) {
                format!("{word}es")
            } else if consonant_y(w) {
                format!("{}ies", stem_y())
            } else {
                format!("{word}s")
            }
        }
        Gerund => {
            if let Some(stem) = word.strip_suffix("ie") {
                format!("{stem}ying")
            } else if word.ends_with("ee") || word.ends_with("ye") || word.ends_with("oe") {
                format!("{word}ing")
            } else if word.ends_with('e') && word.len() > 2 {
                format!("{}ing", &word[..word.len() - 1])
            } else if is_cvc(w) {
                doubled("ing")
            } else {
                format!("{word}ing")
            }
        }
        Past | PastPart => {
            if word.ends_with('e') {
                format!("{word}d")
            } else if consonant_y(w) {
                format!("{}ied", stem_y())
            } else if is_cvc(w) {
                doubled("ed")
            } else {
                format!("{word}ed")
            }
        }
        Comparative | Superlative => {
            let (suffix, adverb) = if form == Comparative {
                ("er", "more")
            } else {
                ("est", "most")
            };
            if syllables(word) >= 3 {
                format!("{adverb} {word}")
            } else if word.ends_with('e') {
                format!("{word}{}", &suffix[1..])
            } else if consonant_y(w) {
                format!("{}i{suffix}", stem_y())
            } else if is_cvc(w) {
                doubled(suffix)
            } else {
                format!("{word}{suffix}")
            }
        }
    }
}

/// Reverses the regular suffix rules, most specific reversal first.
fn reversal_candidates(w: &str, suffix: &str, y_suffix: &str) -> Vec<String> {
    let Some(stem) = w.strip_suffix(suffix) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if let Some(s) = w.strip_suffix(y_suffix) {
        out.push(format!("{s}y"));
    }
    if suffix == "ing" {
        if let Some(s) = w.strip_suffix("ying") {
            out.push(format!("{s}ie"));
        }
    }
    let b = stem.as_bytes();
    if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
        out.push(stem[..stem.len() - 1].to_string());
    }
    if suffix == "ing" {
        out.push(format!("{stem}e"));
    } else if let Some(s) = w.strip_suffix(&suffix[1..]) {
        // "-d", "-r", "-st" after a final e
        if s.ends_with('e') {
            out.push(s.to_string());
        }
    }
    out.push(stem.to_string());
    out.retain(|c| c.len() >= 2);
    out
}

/// Detects and applies inflections. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Inflector {
    table: Arc<IrregularTable>,
    lexicon: Option<Arc<PosLexicon>>,
}

impl Inflector {
    pub fn new(table: Arc<IrregularTable>, lexicon: Option<Arc<PosLexicon>>) -> Self {
        Inflector { table, lexicon }
    }

    /// Bundled irregular table plus the bundled POS lexicon.
    pub fn bundled() -> Self {
        Self::new(
            Arc::new(IrregularTable::bundled()),
            Some(Arc::new(PosLexicon::bundled())),
        )
    }

    pub fn table(&self) -> &IrregularTable {
        &self.table
    }

    fn known(&self, word: &str, pos: PosCategory) -> bool {
        self.lexicon.as_ref().is_some_and(|l| l.has(word, pos))
    }

    /// False only when a lexicon is attached and does not list `word` under
    /// `pos`. OTHER and multiword entries always pass.
    pub fn admits(&self, word: &str, pos: PosCategory) -> bool {
        match (&self.lexicon, pos) {
            (Some(l), PosCategory::Verb | PosCategory::Noun | PosCategory::Adj) => {
                word.contains(' ') || l.has(word, pos)
            }
            _ => true,
        }
    }

    /// Inflects a base-form lemma. Multiword inputs inflect the first token
    /// only, except periphrastic comparison which wraps the whole phrase.
    pub fn inflect_to(&self, lemma: &str, form: InflectionForm) -> String {
        let lemma = normalize(lemma);
        if form.is_base() || form == InflectionForm::Unknown || lemma.is_empty() {
            return lemma;
        }
        if let Some(surface) = self.table.lookup(&lemma, form) {
            return surface.to_string();
        }
        match lemma.split_once(' ') {
            Some((head, rest))
                if !matches!(form, InflectionForm::Comparative | InflectionForm::Superlative) =>
            {
                let head = self
                    .table
                    .lookup(head, form)
                    .map(str::to_string)
                    .unwrap_or_else(|| regular(head, form));
                format!("{head} {rest}")
            }
            Some(_) => {
                let adverb = if form == InflectionForm::Comparative {
                    "more"
                } else {
                    "most"
                };
                format!("{adverb} {lemma}")
            }
            None => regular(&lemma, form),
        }
    }

    /// Maps a surface to `(lemma, form)` for the given category.
    pub fn detect_form(&self, surface: &str, pos: PosCategory) -> (String, InflectionForm) {
        let w = normalize(surface);
        let base = InflectionForm::base_for(pos);
        if base == InflectionForm::Unknown {
            return (w, InflectionForm::Unknown);
        }
        if pos == PosCategory::Adj {
            for (adverb, form) in [
                ("more ", InflectionForm::Comparative),
                ("most ", InflectionForm::Superlative),
            ] {
                if let Some(rest) = w.strip_prefix(adverb) {
                    if !rest.contains(' ') && !rest.is_empty() {
                        return (rest.to_string(), form);
                    }
                }
            }
        }
        if w.is_empty() || !w.chars().all(|c| c.is_ascii_lowercase()) {
            return (w, InflectionForm::Unknown);
        }
        if let Some((lemma, form)) = self
            .table
            .analyses(&w)
            .iter()
            .find(|(_, f)| f.category() == pos)
        {
            return (lemma.clone(), *form);
        }
        let attempts: Vec<(Vec<String>, InflectionForm)> = match pos {
            PosCategory::Verb if w.len() > 4 && w.ends_with("ing") => {
                vec![(reversal_candidates(&w, "ing", "ying"), InflectionForm::Gerund)]
            }
            PosCategory::Verb if w.len() > 3 && w.ends_with("ed") => {
                vec![(reversal_candidates(&w, "ed", "ied"), InflectionForm::Past)]
            }
            PosCategory::Verb | PosCategory::Noun if w.len() > 2 && w.ends_with('s') => {
                let form = if pos == PosCategory::Verb {
                    InflectionForm::ThirdSg
                } else {
                    InflectionForm::Plural
                };
                let mut c = Vec::new();
                if let Some(s) = w.strip_suffix("ies") {
                    c.push(format!("{s}y"));
                }
                if let Some(s) = w.strip_suffix("es") {
                    c.push(s.to_string());
                }
                c.push(w[..w.len() - 1].to_string());
                c.retain(|s| s.len() >= 2);
                vec![(c, form)]
            }
            PosCategory::Adj if w.len() > 4 && w.ends_with("est") => {
                vec![(reversal_candidates(&w, "est", "iest"), InflectionForm::Superlative)]
            }
            PosCategory::Adj if w.len() > 3 && w.ends_with("er") => {
                vec![(reversal_candidates(&w, "er", "ier"), InflectionForm::Comparative)]
            }
            _ => Vec::new(),
        };
        for (candidates, form) in attempts {
            let accepted: Vec<&String> = candidates
                .iter()
                .filter(|c| self.inflect_to(c, form) == w)
                .collect();
            if let Some(c) = accepted.iter().find(|c| self.known(c, pos)) {
                return ((*c).clone(), form);
            }
            if self.known(&w, pos) {
                return (w, base);
            }
            if let Some(c) = accepted.first() {
                return ((*c).clone(), form);
            }
        }
        (w, base)
    }

    /// Checks that the table's inverse agrees with its forward map.
    pub fn table_is_consistent(&self) -> bool {
        self.table.entries().all(|(lemma, form, surface)| {
            surface == lemma
                || self
                    .table
                    .analyses(surface)
                    .iter()
                    .any(|(l, f)| l == lemma && *f == form)
        })
    }
}
