// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::pos::ModuleId;

/// A proposed substitute for the target word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub lemma: String,
    /// Inflection-matched surface form.
    pub surface: String,
    pub source: ModuleId,
    /// Score in the producing module's own scale.
    pub module_score: f64,
    pub final_score: Option<f64>,
    /// 1-based rank after re-ranking.
    pub rank: Option<usize>,
}

impl Candidate {
    pub fn new(lemma: impl Into<String>, surface: impl Into<String>, source: ModuleId, module_score: f64) -> Self {
        Candidate {
            lemma: lemma.into(),
            surface: surface.into(),
            source,
            module_score,
            final_score: None,
            rank: None,
        }
    }

    /// Candidate whose surface is its lemma (not yet inflection-matched).
    pub fn from_lemma(lemma: impl Into<String>, source: ModuleId, module_score: f64) -> Self {
        let lemma = lemma.into();
        Candidate::new(lemma.clone(), lemma, source, module_score)
    }
}
