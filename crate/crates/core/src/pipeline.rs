// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Per-instance orchestration: tag, route, collect, normalize, re-rank.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::candidate::Candidate;
use crate::data::{Instance, PosCategory, PredictionRecord};
use crate::inflect::{InflectionForm, Inflector};
use crate::kg::{link_entity, synonym_candidates, EntityLinker, KgConfig, LexicalLinker, SynonymGraph};
use crate::mlm::{fill_rank, generate_fill_candidates, make_masked_context, GenerateConfig, MaskedLmScorer};
use crate::pos::{modules_for_pos, tag_target_pos, ContextualPosTagger, ModuleId, RoutingConfig};
use crate::ppdb::{paraphrases_for, ParaphraseIndex};
use crate::text::{capitalize, normalize, starts_uppercase};
use crate::verbnet::VerbLexicon;
use crate::vsd::{vsd_candidates, VsdConfig, VsdError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("run.top_n must be at least 1")]
    ZeroTopN,
    #[error("invalid vsd settings: {0}")]
    Vsd(String),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub routing: RoutingConfig,
    pub vsd: VsdConfig,
    pub ppdb_limit: usize,
    pub generate: GenerateConfig,
    pub kg: KgConfig,
    pub top_n: usize,
    pub drop_target_variants: bool,
    /// Global module filter applied after routing. `None` enables all.
    pub enabled_modules: Option<BTreeSet<ModuleId>>,
    /// Worker threads; 0 means available parallelism.
    pub workers: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            routing: RoutingConfig::default(),
            vsd: VsdConfig::default(),
            ppdb_limit: 15,
            generate: GenerateConfig::default(),
            kg: KgConfig::default(),
            top_n: 5,
            drop_target_variants: true,
            enabled_modules: None,
            workers: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.top_n == 0 {
            return Err(PipelineError::ZeroTopN);
        }
        self.vsd.validate().map_err(PipelineError::Vsd)
    }

    /// Routed modules for `pos` that are also enabled.
    pub fn modules_for(&self, pos: PosCategory) -> Vec<ModuleId> {
        modules_for_pos(pos, &self.routing)
            .into_iter()
            .filter(|m| self.enabled_modules.as_ref().is_none_or(|e| e.contains(m)))
            .collect()
    }
}

/// Shared read-only resources. Lexical sources are optional; a routed module
/// whose source is missing fails for that instance.
#[derive(Clone)]
pub struct Resources {
    pub tagger: Arc<dyn ContextualPosTagger>,
    pub inflector: Inflector,
    pub scorer: Arc<dyn MaskedLmScorer>,
    pub verbnet: Option<Arc<VerbLexicon>>,
    pub ppdb: Option<Arc<ParaphraseIndex>>,
    pub kg: Option<Arc<SynonymGraph>>,
    pub linker: Arc<dyn EntityLinker>,
}

impl Resources {
    pub fn new(
        tagger: Arc<dyn ContextualPosTagger>,
        inflector: Inflector,
        scorer: Arc<dyn MaskedLmScorer>,
    ) -> Self {
        Resources {
            tagger,
            inflector,
            scorer,
            verbnet: None,
            ppdb: None,
            kg: None,
            linker: Arc::new(LexicalLinker),
        }
    }

    pub fn with_verbnet(mut self, lex: Arc<VerbLexicon>) -> Self {
        self.verbnet = Some(lex);
        self
    }

    pub fn with_ppdb(mut self, idx: Arc<ParaphraseIndex>) -> Self {
        self.ppdb = Some(idx);
        self
    }

    pub fn with_kg(mut self, graph: Arc<SynonymGraph>) -> Self {
        self.kg = Some(graph);
        self
    }
}

/// How one module fared on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleReport {
    pub module: ModuleId,
    pub candidates: Vec<Candidate>,
    pub elapsed: Duration,
    /// Failure message, if the module failed.
    pub error: Option<String>,
    /// Expected outcomes such as an unknown verb or an unlinked entity.
    /// They are not counted as issues.
    pub benign: bool,
    /// Winning class, for VSD.
    pub note: Option<String>,
}

impl ModuleReport {
    pub fn is_issue(&self) -> bool {
        self.error.is_some() && !self.benign
    }
}

/// Everything that happened to one instance.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceOutcome {
    pub record: PredictionRecord,
    pub pos: PosCategory,
    pub target_lemma: String,
    pub target_form: InflectionForm,
    pub modules: Vec<ModuleReport>,
    /// Merged candidates in final order with ranks assigned.
    pub ranked: Vec<Candidate>,
    /// Candidates whose surface was passed through uninflected.
    pub passthrough: usize,
    pub dropped_variants: usize,
    pub rejected_fillers: usize,
    /// Set when re-ranking failed and module priority ordered the list.
    pub fallback: Option<String>,
    pub empty_candidates: bool,
}

impl InstanceOutcome {
    pub fn invoked(&self) -> Vec<ModuleId> {
        self.modules.iter().map(|m| m.module).collect()
    }

    /// Problems worth surfacing: module failures, scorer fallback, no output.
    pub fn issues(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .modules
            .iter()
            .filter(|m| m.is_issue())
            .map(|m| format!("{} failed: {}", m.module, m.error.as_deref().unwrap_or("")))
            .collect();
        if let Some(f) = &self.fallback {
            out.push(format!("re-ranking fell back to module priority: {f}"));
        }
        if self.empty_candidates {
            out.push("no candidates".to_string());
        }
        out
    }
}

struct ModuleRun {
    result: Result<Vec<Candidate>, (String, bool)>,
    note: Option<String>,
}

fn missing(what: &str) -> ModuleRun {
    ModuleRun {
        result: Err((format!("{what} not loaded"), false)),
        note: None,
    }
}

fn run_module(
    module: ModuleId,
    instance: &Instance,
    target_lemma: &str,
    res: &Resources,
    cfg: &PipelineConfig,
) -> ModuleRun {
    let pos = instance.pos();
    match module {
        ModuleId::Vsd => {
            let Some(lex) = &res.verbnet else {
                return missing("verb lexicon");
            };
            match vsd_candidates(instance, lex, res.scorer.as_ref(), &res.inflector, &cfg.vsd) {
                Ok(out) => ModuleRun {
                    result: Ok(out.candidates),
                    note: Some(format!("class {}", out.vote.winning_class)),
                },
                Err(e) => {
                    let benign = matches!(e, VsdError::NotAVerbNetVerb(_));
                    ModuleRun {
                        result: Err((e.to_string(), benign)),
                        note: None,
                    }
                }
            }
        }
        ModuleId::Ppdb => {
            let Some(idx) = &res.ppdb else {
                return missing("paraphrase database");
            };
            let mut found = paraphrases_for(idx, target_lemma, pos, cfg.ppdb_limit);
            let surface = normalize(instance.surface());
            if found.is_empty() && surface != target_lemma {
                found = paraphrases_for(idx, &surface, pos, cfg.ppdb_limit);
            }
            ModuleRun {
                result: Ok(found),
                note: None,
            }
        }
        ModuleId::Mlm => {
            let ctx = make_masked_context(instance);
            ModuleRun {
                result: generate_fill_candidates(res.scorer.as_ref(), &ctx, &cfg.generate, Some(target_lemma))
                    .map_err(|e| (e.to_string(), false)),
                note: None,
            }
        }
        ModuleId::Kg => {
            let Some(graph) = &res.kg else {
                return missing("knowledge graph");
            };
            let linked = link_entity(graph, res.linker.as_ref(), target_lemma, &instance.context)
                .or_else(|| link_entity(graph, res.linker.as_ref(), instance.surface(), &instance.context));
            match linked {
                Some(node) => ModuleRun {
                    result: Ok(synonym_candidates(graph, &node, &cfg.kg)),
                    note: Some(format!("node {node}")),
                },
                None => ModuleRun {
                    result: Err(("no linked entity".to_string(), true)),
                    note: None,
                },
            }
        }
    }
}

/// Runs each routed module in aggregation order. Failures are recorded and
/// never stop the other modules.
pub fn collect_candidates(
    instance: &Instance,
    target_lemma: &str,
    res: &Resources,
    cfg: &PipelineConfig,
) -> Vec<ModuleReport> {
    cfg.modules_for(instance.pos())
        .into_iter()
        .map(|module| {
            let start = Instant::now();
            let run = run_module(module, instance, target_lemma, res, cfg);
            let elapsed = start.elapsed();
            let (candidates, error, benign) = match run.result {
                Ok(c) => (c, None, false),
                Err((msg, benign)) => (Vec::new(), Some(msg), benign),
            };
            ModuleReport {
                module,
                candidates,
                elapsed,
                error,
                benign,
                note: run.note,
            }
        })
        .collect()
}

/// Result of [`normalize_and_dedup`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub candidates: Vec<Candidate>,
    pub passthrough: usize,
    pub dropped_variants: usize,
    /// Fillers whose lemma the lexicon does not list under the target's POS.
    pub rejected: usize,
}

/// Inflects every candidate like the target, merges duplicates (the earliest
/// module wins) and optionally removes variants of the target itself.
/// Masked-LM fillers must also be listed under the target's POS.
pub fn normalize_and_dedup(
    cands: Vec<Candidate>,
    instance: &Instance,
    inflector: &Inflector,
    drop_target_variants: bool,
) -> Normalized {
    let pos = instance.pos();
    let surface = instance.surface();
    let (target_lemma, form) = inflector.detect_form(surface, pos);
    let target_keys: BTreeSet<String> = [normalize(surface), normalize(&instance.target), target_lemma.clone()]
        .into_iter()
        .collect();
    let upper = starts_uppercase(surface);

    let mut cands = cands;
    cands.sort_by_key(|c| c.source);
    let mut seen = BTreeSet::new();
    let mut out = Normalized {
        candidates: Vec::new(),
        passthrough: 0,
        dropped_variants: 0,
        rejected: 0,
    };
    for mut c in cands {
        let mut lemma = normalize(&c.lemma);
        if c.source == ModuleId::Mlm && form != InflectionForm::Unknown {
            lemma = inflector.detect_form(&lemma, pos).0;
            if !inflector.admits(&lemma, pos) {
                out.rejected += 1;
                continue;
            }
        }
        let passthrough = form == InflectionForm::Unknown
            || (pos == PosCategory::Noun && lemma.contains(' ') && !form.is_base());
        let shaped = if passthrough {
            out.passthrough += 1;
            normalize(&c.surface)
        } else {
            inflector.inflect_to(&lemma, form)
        };
        if shaped.is_empty() {
            continue;
        }
        let key = normalize(&shaped);
        if drop_target_variants && (target_keys.contains(&key) || target_keys.contains(&lemma)) {
            out.dropped_variants += 1;
            continue;
        }
        if !seen.insert(key) {
            continue;
        }
        c.lemma = lemma;
        c.surface = if upper { capitalize(&shaped) } else { shaped };
        out.candidates.push(c);
    }
    out
}

/// Orders candidates by fill-rank score. On scorer failure the order falls
/// back to module priority, then module score; the error is returned with it.
pub fn rerank(
    mut cands: Vec<Candidate>,
    instance: &Instance,
    scorer: &dyn MaskedLmScorer,
) -> (Vec<Candidate>, Option<String>) {
    let texts: Vec<String> = cands.iter().map(|c| c.surface.clone()).collect();
    let ctx = make_masked_context(instance);
    let fallback = match fill_rank(scorer, &ctx, &texts) {
        Ok(ranked) => {
            let mut by_text: BTreeMap<String, Candidate> =
                cands.drain(..).map(|c| (c.surface.clone(), c)).collect();
            for scored in ranked {
                if let Some(mut c) = by_text.remove(&scored.text) {
                    c.final_score = Some(scored.log_prob);
                    cands.push(c);
                }
            }
            // texts the scorer renamed keep their relative order at the end
            cands.extend(by_text.into_values());
            None
        }
        Err(e) => {
            cands.sort_by(|a, b| a.source.cmp(&b.source).then(b.module_score.total_cmp(&a.module_score)));
            Some(e.to_string())
        }
    };
    for (i, c) in cands.iter_mut().enumerate() {
        c.rank = Some(i + 1);
    }
    (cands, fallback)
}

/// Ranks candidates and keeps the first `top_n` surfaces.
pub fn rerank_top_n(
    cands: Vec<Candidate>,
    instance: &Instance,
    scorer: &dyn MaskedLmScorer,
    top_n: usize,
) -> (PredictionRecord, Vec<Candidate>, Option<String>) {
    let (ranked, fallback) = rerank(cands, instance, scorer);
    let (record, _) = PredictionRecord::new(
        instance.context.clone(),
        instance.target.clone(),
        ranked.iter().take(top_n).map(|c| c.surface.clone()),
    );
    (record, ranked, fallback)
}

/// The full per-instance pipeline.
pub fn run_instance(instance: &Instance, res: &Resources, cfg: &PipelineConfig) -> InstanceOutcome {
    let mut instance = instance.clone();
    let pos = tag_target_pos(&mut instance, res.tagger.as_ref());
    let (target_lemma, target_form) = res.inflector.detect_form(instance.surface(), pos);
    let modules = collect_candidates(&instance, &target_lemma, res, cfg);
    let pooled: Vec<Candidate> = modules.iter().flat_map(|m| m.candidates.iter().cloned()).collect();
    let empty_record = || PredictionRecord::new(instance.context.clone(), instance.target.clone(), Vec::<String>::new()).0;

    let normalized = normalize_and_dedup(pooled, &instance, &res.inflector, cfg.drop_target_variants);
    let mut outcome = InstanceOutcome {
        record: empty_record(),
        pos,
        target_lemma,
        target_form,
        modules,
        ranked: Vec::new(),
        passthrough: normalized.passthrough,
        dropped_variants: normalized.dropped_variants,
        rejected_fillers: normalized.rejected,
        fallback: None,
        empty_candidates: normalized.candidates.is_empty(),
    };
    if outcome.empty_candidates {
        return outcome;
    }
    let (record, ranked, fallback) = rerank_top_n(normalized.candidates, &instance, res.scorer.as_ref(), cfg.top_n);
    outcome.record = record;
    outcome.ranked = ranked;
    outcome.fallback = fallback;
    outcome
}

/// Runs every instance on a pool of `cfg.workers` threads. Outcomes come
/// back in input order.
pub fn run_dataset(
    instances: &[Instance],
    res: &Resources,
    cfg: &PipelineConfig,
) -> Result<Vec<InstanceOutcome>, PipelineError> {
    cfg.validate()?;
    if cfg.workers == 1 {
        return Ok(instances.iter().map(|i| run_instance(i, res, cfg)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| PipelineError::Pool(e.to_string()))?;
    Ok(pool.install(|| instances.par_iter().map(|i| run_instance(i, res, cfg)).collect()))
}

/// Per-module totals over a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ModuleTotals {
    pub invocations: usize,
    pub failures: usize,
    pub candidates: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub instances: usize,
    pub empty_candidates: usize,
    pub with_issues: usize,
    pub modules: BTreeMap<ModuleId, ModuleTotals>,
}

impl RunSummary {
    pub fn from_outcomes(outcomes: &[InstanceOutcome]) -> Self {
        let mut s = RunSummary {
            instances: outcomes.len(),
            ..RunSummary::default()
        };
        for o in outcomes {
            s.empty_candidates += usize::from(o.empty_candidates);
            s.with_issues += usize::from(!o.issues().is_empty());
            for m in &o.modules {
                let t = s.modules.entry(m.module).or_default();
                t.invocations += 1;
                t.failures += usize::from(m.is_issue());
                t.candidates += m.candidates.len();
                t.elapsed += m.elapsed;
            }
        }
        s
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "instances: {}  empty: {}  with issues: {}\n",
            self.instances, self.empty_candidates, self.with_issues
        );
        for (m, t) in &self.modules {
            let _ = writeln!(
                out,
                "  {:<5} calls {:>5}  failures {:>4}  candidates {:>6}  time {:>9.3} ms",
                m.as_str(),
                t.invocations,
                t.failures,
                t.candidates,
                t.elapsed.as_secs_f64() * 1e3
            );
        }
        out
    }
}

/// Human-readable trace of one instance.
pub fn render_trace(o: &InstanceOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sentence: {}", o.record.context);
    let _ = writeln!(out, "target:   {}", o.record.target);
    let _ = writeln!(out, "pos:      {}", o.pos);
    let _ = writeln!(out, "lemma:    {} ({})", o.target_lemma, o.target_form.as_str());
    let names: Vec<&str> = o.modules.iter().map(|m| m.module.as_str()).collect();
    let _ = writeln!(out, "modules:  {}", names.join(", "));
    for m in &o.modules {
        let _ = write!(out, "\n[{}] {} candidates", m.module, m.candidates.len());
        if let Some(n) = &m.note {
            let _ = write!(out, ", {n}");
        }
        if let Some(e) = &m.error {
            let _ = write!(out, ", {}: {e}", if m.benign { "skipped" } else { "error" });
        }
        out.push('\n');
        for c in &m.candidates {
            let _ = writeln!(out, "  {:<20} {:>10.4}", c.surface, c.module_score);
        }
    }
    let _ = writeln!(
        out,
        "\nmerged: {} candidates ({} dropped as target variants, {} fillers rejected by POS, {} passed through)",
        o.ranked.len(),
        o.dropped_variants,
        o.rejected_fillers,
        o.passthrough
    );
    for c in &o.ranked {
        let score = c.final_score.map_or("-".to_string(), |s| format!("{s:.4}"));
        let _ = writeln!(
            out,
            "  {:>2}. {:<20} {:>10}  {} <- {}",
            c.rank.unwrap_or(0),
            c.surface,
            score,
            c.source,
            c.lemma
        );
    }
    if let Some(f) = &o.fallback {
        let _ = writeln!(out, "fallback ordering: {f}");
    }
    let _ = writeln!(out, "\noutput: {}", o.record.substitutes().join(", "));
    out
}
