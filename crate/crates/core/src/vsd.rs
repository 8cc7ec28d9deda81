// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Verb sense disambiguation by fill-rank voting.
//!
//! Every class containing the target verb contributes its members to a pool.
//! The pool is inflected like the target, scored in the masked slot, and the
//! class with the most members among the top `k` wins. All members of the
//! winning class become candidates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate::Candidate;
use crate::data::{Instance, PosCategory};
use crate::inflect::Inflector;
use crate::mlm::{make_masked_context, MaskedLmScorer, MlmError};
use crate::pos::ModuleId;
use crate::text::{capitalize, starts_uppercase};
use crate::verbnet::{LexiconError, VerbLexicon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VsdConfig {
    /// Vote window.
    pub k: usize,
    /// Cap on pooled members sent to the scorer.
    pub max_pool: usize,
    pub include_subclasses: bool,
}

impl Default for VsdConfig {
    fn default() -> Self {
        VsdConfig {
            k: 10,
            max_pool: 60,
            include_subclasses: true,
        }
    }
}

impl VsdConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.k == 0 || self.k > self.max_pool {
            return Err(format!(
                "vsd.k must satisfy 1 <= k <= max_pool (k={}, max_pool={})",
                self.k, self.max_pool
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum VsdError {
    #[error("{0:?} is not a VerbNet verb")]
    NotAVerbNetVerb(String),
    #[error("no pooled members to vote on")]
    EmptyPool,
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Scorer(#[from] MlmError),
}

/// Candidate classes and the pooled members to score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePool {
    pub classes: BTreeSet<String>,
    /// Sorted, target removed, truncated to `max_pool`.
    pub lemmas: Vec<String>,
}

pub fn candidate_pool(
    lex: &VerbLexicon,
    target_lemma: &str,
    cfg: &VsdConfig,
) -> Result<CandidatePool, VsdError> {
    let classes = lex.classes_for_verb(target_lemma);
    if classes.is_empty() {
        return Err(VsdError::NotAVerbNetVerb(target_lemma.to_string()));
    }
    let members = lex.members_of_classes(&classes, cfg.include_subclasses)?;
    let lemmas = members
        .into_iter()
        .filter(|m| m != target_lemma)
        .take(cfg.max_pool)
        .collect();
    Ok(CandidatePool { classes, lemmas })
}

/// For each pooled lemma, the candidate classes it counts toward.
pub fn pool_membership(
    lex: &VerbLexicon,
    classes: &BTreeSet<String>,
    include_subclasses: bool,
) -> Result<BTreeMap<String, BTreeSet<String>>, VsdError> {
    let mut membership: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for class in classes {
        for m in lex.members_of_classes([class], include_subclasses)? {
            membership.entry(m).or_default().insert(class.clone());
        }
    }
    Ok(membership)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassVoteResult {
    pub winning_class: String,
    /// Hits per class inside the vote window.
    pub tally: BTreeMap<String, usize>,
    pub ranked_pool: Vec<(String, f64)>,
}

/// Sorts scored lemmas best first, ties by lemma.
pub fn rank_pool(scored: &mut [(String, f64)]) {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Votes over the first `min(k, |pool|)` ranked lemmas. A lemma in several
/// classes counts once for each. Ties go to the class holding the
/// best-ranked member, then to the smaller class id.
pub fn class_vote(
    scored_pool: &[(String, f64)],
    membership: &BTreeMap<String, BTreeSet<String>>,
    cfg: &VsdConfig,
) -> Result<ClassVoteResult, VsdError> {
    if scored_pool.is_empty() {
        return Err(VsdError::EmptyPool);
    }
    let window = cfg.k.min(scored_pool.len());
    let mut tally: BTreeMap<String, usize> = BTreeMap::new();
    let mut first_hit: BTreeMap<&str, usize> = BTreeMap::new();
    for (pos, (lemma, _)) in scored_pool[..window].iter().enumerate() {
        for class in membership.get(lemma).into_iter().flatten() {
            *tally.entry(class.clone()).or_default() += 1;
            first_hit.entry(class).or_insert(pos);
        }
    }
    let winning_class = tally
        .iter()
        .min_by(|(a, na), (b, nb)| {
            nb.cmp(na)
                .then_with(|| first_hit[a.as_str()].cmp(&first_hit[b.as_str()]))
                .then_with(|| a.cmp(b))
        })
        .map(|(c, _)| c.clone())
        .ok_or(VsdError::EmptyPool)?;
    Ok(ClassVoteResult {
        winning_class,
        tally,
        ranked_pool: scored_pool.to_vec(),
    })
}

/// Candidates plus the vote that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct VsdOutput {
    pub candidates: Vec<Candidate>,
    pub vote: ClassVoteResult,
    pub candidate_classes: BTreeSet<String>,
}

pub fn vsd_candidates(
    instance: &Instance,
    lex: &VerbLexicon,
    scorer: &dyn MaskedLmScorer,
    inflector: &Inflector,
    cfg: &VsdConfig,
) -> Result<VsdOutput, VsdError> {
    let surface = instance.surface();
    let (target_lemma, form) = inflector.detect_form(surface, PosCategory::Verb);
    let pool = candidate_pool(lex, &target_lemma, cfg)?;
    let shape = |lemma: &str| {
        let s = inflector.inflect_to(lemma, form);
        if starts_uppercase(surface) {
            capitalize(&s)
        } else {
            s
        }
    };
    let fills: Vec<String> = pool.lemmas.iter().map(|l| shape(l)).collect();
    let ctx = make_masked_context(instance);
    let scores = scorer.score(&ctx, &fills)?;
    if scores.len() != fills.len() {
        return Err(MlmError::Schema(format!("{} scores for {} texts", scores.len(), fills.len())).into());
    }
    let mut scored: Vec<(String, f64)> = pool
        .lemmas
        .iter()
        .cloned()
        .zip(scores.iter().map(|s| s.log_prob))
        .collect();
    rank_pool(&mut scored);

    let membership = pool_membership(lex, &pool.classes, cfg.include_subclasses)?;
    let vote = class_vote(&scored, &membership, cfg)?;

    let score_of: BTreeMap<&str, f64> = scored.iter().map(|(l, s)| (l.as_str(), *s)).collect();
    let winners = lex.members_of_classes([&vote.winning_class], cfg.include_subclasses)?;
    let mut candidates: Vec<Candidate> = winners
        .iter()
        .filter(|m| **m != target_lemma)
        .map(|m| {
            let score = score_of.get(m.as_str()).copied().unwrap_or(f64::NEG_INFINITY);
            Candidate::new(m.clone(), shape(m), ModuleId::Vsd, score)
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.module_score
            .total_cmp(&a.module_score)
            .then_with(|| a.lemma.cmp(&b.lemma))
    });
    Ok(VsdOutput {
        candidates,
        vote,
        candidate_classes: pool.classes,
    })
}
