// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! TOML application configuration and resource loading.
//!
//! Relative paths are resolved against the directory of the config file.
//! `LEXSIMP_SCORER_URL` overrides `mlm.endpoint`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::PosCategory;
use crate::inflect::{Inflector, IrregularTable};
use crate::kg::{KgConfig, SynonymGraph, DEFAULT_RELATION};
use crate::metrics::MetricConfig;
use crate::mlm::{GenerateConfig, MaskedLmScorer, RemoteConfig, RemoteScorer, UnigramScorer};
use crate::pipeline::{PipelineConfig, Resources};
use crate::pos::{ContextualPosTagger, LexiconTagger, ModuleId, PosLexicon, ProcessTagger, RoutingConfig, RoutingProfile};
use crate::ppdb::ParaphraseIndex;
use crate::verbnet::load_verbnet;
use crate::vsd::VsdConfig;

pub const SCORER_URL_ENV: &str = "LEXSIMP_SCORER_URL";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("missing or unreadable resources:\n{}", format_problems(.0))]
    Resources(Vec<ResourceProblem>),
}

/// A resource that could not be loaded, keyed by its config key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceProblem {
    pub key: &'static str,
    pub path: Option<PathBuf>,
    pub message: String,
}

impl fmt::Display for ResourceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.path {
            Some(p) => write!(f, "{} ({}): {}", self.key, p.display(), self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

fn format_problems(problems: &[ResourceProblem]) -> String {
    problems.iter().map(|p| format!("  {p}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResourcePaths {
    pub verbnet_dir: Option<PathBuf>,
    pub ppdb_path: Option<PathBuf>,
    pub kg_nodes: Option<PathBuf>,
    pub kg_edges: Option<PathBuf>,
    /// Replaces the bundled irregular-forms table.
    pub irregulars_path: Option<PathBuf>,
    /// Replaces the bundled POS lexicon.
    pub pos_lexicon: Option<PathBuf>,
    /// Replaces the bundled unigram table of the stub scorer.
    pub unigram_counts: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoutingSection {
    pub profile: RoutingProfile,
    /// Rows for the custom profile, keyed by VERB/NOUN/ADJ/OTHER.
    pub custom: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaggerSection {
    /// External tagger command and arguments. Empty uses the built-in tagger.
    pub command: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpdbSection {
    pub limit: usize,
}

impl Default for PpdbSection {
    fn default() -> Self {
        PpdbSection { limit: 15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MlmBackend {
    #[default]
    Stub,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlmSection {
    pub backend: MlmBackend,
    pub endpoint: Option<String>,
    pub generate_endpoint: Option<String>,
    pub top_n: usize,
    pub timeout_secs: f64,
    pub retries: u32,
    pub max_concurrent: usize,
    pub max_batch: usize,
}

impl Default for MlmSection {
    fn default() -> Self {
        MlmSection {
            backend: MlmBackend::Stub,
            endpoint: None,
            generate_endpoint: None,
            top_n: GenerateConfig::default().top_n,
            timeout_secs: 30.0,
            retries: 2,
            max_concurrent: 4,
            max_batch: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KgSection {
    pub limit: usize,
    pub relation_name: String,
    pub lang: Option<String>,
}

impl Default for KgSection {
    fn default() -> Self {
        KgSection {
            limit: 15,
            relation_name: DEFAULT_RELATION.to_string(),
            lang: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub top_n: usize,
    /// 0 means available parallelism.
    pub workers: usize,
    pub drop_target_variants: bool,
    /// Global module filter; `None` enables every routed module.
    pub modules: Option<Vec<String>>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            top_n: 5,
            workers: 0,
            drop_target_variants: true,
            modules: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub resources: ResourcePaths,
    pub routing: RoutingSection,
    pub tagger: TaggerSection,
    pub vsd: VsdConfig,
    pub ppdb: PpdbSection,
    pub mlm: MlmSection,
    pub kg: KgSection,
    pub run: RunSection,
    pub metrics: MetricConfig,
}

fn resolve(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl AppConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a config file, resolves relative paths and applies the scorer
    /// URL environment override.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.apply_env();
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let r = &mut self.resources;
        for p in [
            &mut r.verbnet_dir,
            &mut r.ppdb_path,
            &mut r.kg_nodes,
            &mut r.kg_edges,
            &mut r.irregulars_path,
            &mut r.pos_lexicon,
            &mut r.unigram_counts,
        ] {
            resolve(base, p);
        }
    }

    pub fn apply_env(&mut self) {
        if let Ok(url) = std::env::var(SCORER_URL_ENV) {
            if !url.trim().is_empty() {
                self.mlm.endpoint = Some(url.trim().to_string());
            }
        }
    }

    pub fn routing_config(&self) -> Result<RoutingConfig, ConfigError> {
        let custom = if self.routing.custom.is_empty() {
            None
        } else {
            let mut rows = BTreeMap::new();
            for (pos, modules) in &self.routing.custom {
                let pos: PosCategory = pos
                    .parse()
                    .map_err(|e| ConfigError::Invalid(format!("routing.custom: {e}")))?;
                let modules = modules
                    .iter()
                    .map(|m| m.parse::<ModuleId>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ConfigError::Invalid(format!("routing.custom.{pos}: {e}")))?;
                rows.insert(pos, modules);
            }
            Some(rows)
        };
        RoutingConfig::for_profile(self.routing.profile, custom)
            .map_err(|e| ConfigError::Invalid(format!("routing: {e}")))
    }

    pub fn enabled_filter(&self) -> Result<Option<BTreeSet<ModuleId>>, ConfigError> {
        self.run
            .modules
            .as_ref()
            .map(|ms| {
                ms.iter()
                    .map(|m| m.parse::<ModuleId>())
                    .collect::<Result<BTreeSet<_>, _>>()
                    .map_err(|e| ConfigError::Invalid(format!("run.modules: {e}")))
            })
            .transpose()
    }

    pub fn pipeline_config(&self) -> Result<PipelineConfig, ConfigError> {
        let cfg = PipelineConfig {
            routing: self.routing_config()?,
            vsd: self.vsd,
            ppdb_limit: self.ppdb.limit,
            generate: GenerateConfig { top_n: self.mlm.top_n },
            kg: KgConfig {
                limit: self.kg.limit,
                relation_name: self.kg.relation_name.clone(),
                lang: self.kg.lang.clone(),
            },
            top_n: self.run.top_n,
            drop_target_variants: self.run.drop_target_variants,
            enabled_modules: self.enabled_filter()?,
            workers: self.run.workers,
        };
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.metrics.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }

    /// Modules that can run: routed somewhere and not filtered out.
    pub fn active_modules(&self) -> Result<BTreeSet<ModuleId>, ConfigError> {
        let filter = self.enabled_filter()?;
        Ok(self
            .routing_config()?
            .all_routed()
            .into_iter()
            .filter(|m| filter.as_ref().is_none_or(|f| f.contains(m)))
            .collect())
    }

    /// Checks every resource the active modules need and reports them all.
    pub fn check_resources(&self) -> Result<Vec<ResourceStatus>, ConfigError> {
        let active = self.active_modules()?;
        Ok(check_all(self, &active))
    }

    /// Loads everything needed by `active`. All problems are collected
    /// before failing.
    pub fn load_resources(&self, active: &BTreeSet<ModuleId>) -> Result<Resources, ConfigError> {
        let mut problems = Vec::new();
        let r = &self.resources;

        let mut note = |key: &'static str, path: Option<&PathBuf>, message: String| {
            problems.push(ResourceProblem {
                key,
                path: path.cloned(),
                message,
            });
        };

        let lexicon = match &r.pos_lexicon {
            Some(p) => File::open(p)
                .and_then(|f| PosLexicon::parse(BufReader::new(f)))
                .map_err(|e| note("resources.pos_lexicon", Some(p), e.to_string()))
                .ok(),
            None => Some(PosLexicon::bundled()),
        }
        .map(Arc::new);
        let table = match &r.irregulars_path {
            Some(p) => File::open(p)
                .map_err(|e| e.to_string())
                .and_then(|f| IrregularTable::parse(BufReader::new(f)).map_err(|e| e.to_string()))
                .map_err(|e| note("resources.irregulars_path", Some(p), e))
                .ok(),
            None => Some(IrregularTable::bundled()),
        };

        let scorer: Option<Arc<dyn MaskedLmScorer>> = match self.mlm.backend {
            MlmBackend::Stub => match &r.unigram_counts {
                Some(p) => File::open(p)
                    .map_err(|e| e.to_string())
                    .and_then(|f| UnigramScorer::parse(BufReader::new(f)).map_err(|e| e.to_string()))
                    .map(|s| Arc::new(s) as Arc<dyn MaskedLmScorer>)
                    .map_err(|e| note("resources.unigram_counts", Some(p), e))
                    .ok(),
                None => Some(Arc::new(UnigramScorer::bundled())),
            },
            MlmBackend::Remote => match &self.mlm.endpoint {
                Some(url) => Some(Arc::new(RemoteScorer::new(self.remote_config(url)))),
                None => {
                    note("mlm.endpoint", None, format!("required by the remote backend (or set {SCORER_URL_ENV})"));
                    None
                }
            },
        };

        let verbnet = if active.contains(&ModuleId::Vsd) {
            match &r.verbnet_dir {
                None => {
                    note("resources.verbnet_dir", None, "not configured".into());
                    None
                }
                Some(dir) => load_verbnet(dir)
                    .map(|(lex, _)| Arc::new(lex))
                    .map_err(|e| note("resources.verbnet_dir", Some(dir), e.to_string()))
                    .ok(),
            }
        } else {
            None
        };

        let ppdb = if active.contains(&ModuleId::Ppdb) {
            match &r.ppdb_path {
                None => {
                    note("resources.ppdb_path", None, "not configured".into());
                    None
                }
                Some(p) => File::open(p)
                    .map_err(|e| e.to_string())
                    .and_then(|f| ParaphraseIndex::load(BufReader::new(f)).map_err(|e| e.to_string()))
                    .map(|(idx, _)| Arc::new(idx))
                    .map_err(|e| note("resources.ppdb_path", Some(p), e))
                    .ok(),
            }
        } else {
            None
        };

        let kg = if active.contains(&ModuleId::Kg) {
            let nodes = open_required(&r.kg_nodes, "resources.kg_nodes", &mut note);
            let edges = open_required(&r.kg_edges, "resources.kg_edges", &mut note);
            match (nodes, edges) {
                (Some(n), Some(e)) => SynonymGraph::load(BufReader::new(n), BufReader::new(e))
                    .map(Arc::new)
                    .map_err(|e| note("resources.kg_nodes", r.kg_nodes.as_ref(), e.to_string()))
                    .ok(),
                _ => None,
            }
        } else {
            None
        };

        let tagger: Arc<dyn ContextualPosTagger> = match self.tagger.command.split_first() {
            Some((program, args)) => Arc::new(ProcessTagger::new(program.clone(), args.to_vec())),
            None => Arc::new(LexiconTagger::new(lexicon.clone().unwrap_or_else(|| Arc::new(PosLexicon::bundled())))),
        };

        if !problems.is_empty() {
            return Err(ConfigError::Resources(problems));
        }
        let inflector = Inflector::new(Arc::new(table.expect("checked above")), lexicon);
        let mut res = Resources::new(tagger, inflector, scorer.expect("checked above"));
        res.verbnet = verbnet;
        res.ppdb = ppdb;
        res.kg = kg;
        Ok(res)
    }

    fn remote_config(&self, url: &str) -> RemoteConfig {
        let mut rc = RemoteConfig::new(url);
        rc.generate_endpoint = self.mlm.generate_endpoint.clone();
        rc.timeout = Duration::from_secs_f64(self.mlm.timeout_secs.max(0.001));
        rc.retries = self.mlm.retries;
        rc.max_concurrent = self.mlm.max_concurrent.max(1);
        rc.max_batch = self.mlm.max_batch.max(1);
        rc
    }
}

fn open_required(
    path: &Option<PathBuf>,
    key: &'static str,
    note: &mut impl FnMut(&'static str, Option<&PathBuf>, String),
) -> Option<File> {
    match path {
        None => {
            note(key, None, "not configured".into());
            None
        }
        Some(p) => File::open(p).map_err(|e| note(key, Some(p), e.to_string())).ok(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusLevel {
    Ok,
    Warning,
    Error,
    /// Not needed by any active module.
    Unused,
}

impl StatusLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            StatusLevel::Ok => "ok",
            StatusLevel::Warning => "warning",
            StatusLevel::Error => "error",
            StatusLevel::Unused => "unused",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResourceStatus {
    pub key: &'static str,
    pub path: Option<PathBuf>,
    pub level: StatusLevel,
    pub detail: String,
}

impl fmt::Display for ResourceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = self.path.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        write!(f, "{:<8} {:<26} {}  {}", self.level.as_str(), self.key, path, self.detail)
    }
}

/// Share of malformed paraphrase lines above which validation warns.
const PPDB_WARN_RATIO: f64 = 0.5;

fn check_all(cfg: &AppConfig, active: &BTreeSet<ModuleId>) -> Vec<ResourceStatus> {
    let r = &cfg.resources;
    let mut out = Vec::new();
    let status = |key, path: &Option<PathBuf>, level, detail: String| ResourceStatus {
        key,
        path: path.clone(),
        level,
        detail,
    };
    let unused = |key, path: &Option<PathBuf>| status(key, path, StatusLevel::Unused, "module not active".into());
    let not_set = |key, path: &Option<PathBuf>| status(key, path, StatusLevel::Error, "not configured".into());

    if !active.contains(&ModuleId::Vsd) {
        out.push(unused("resources.verbnet_dir", &r.verbnet_dir));
    } else if let Some(dir) = &r.verbnet_dir {
        out.push(match load_verbnet(dir) {
            Ok((_, rep)) => status(
                "resources.verbnet_dir",
                &r.verbnet_dir,
                StatusLevel::Ok,
                format!(
                    "{} files, {} classes ({} subclasses), {} lemmas",
                    rep.files, rep.classes, rep.subclasses, rep.lemmas
                ),
            ),
            Err(e) => status("resources.verbnet_dir", &r.verbnet_dir, StatusLevel::Error, e.to_string()),
        });
    } else {
        out.push(not_set("resources.verbnet_dir", &r.verbnet_dir));
    }

    if !active.contains(&ModuleId::Ppdb) {
        out.push(unused("resources.ppdb_path", &r.ppdb_path));
    } else if let Some(p) = &r.ppdb_path {
        let loaded = File::open(p)
            .map_err(|e| e.to_string())
            .and_then(|f| ParaphraseIndex::load(BufReader::new(f)).map_err(|e| e.to_string()));
        out.push(match loaded {
            Ok((_, rep)) => {
                let level = if rep.skip_ratio() > PPDB_WARN_RATIO {
                    StatusLevel::Warning
                } else {
                    StatusLevel::Ok
                };
                status(
                    "resources.ppdb_path",
                    &r.ppdb_path,
                    level,
                    format!("{} entries, {} of {} lines skipped", rep.entries, rep.skipped, rep.lines),
                )
            }
            Err(e) => status("resources.ppdb_path", &r.ppdb_path, StatusLevel::Error, e),
        });
    } else {
        out.push(not_set("resources.ppdb_path", &r.ppdb_path));
    }

    if !active.contains(&ModuleId::Kg) {
        out.push(unused("resources.kg_nodes", &r.kg_nodes));
        out.push(unused("resources.kg_edges", &r.kg_edges));
    } else {
        let mut files = Vec::new();
        for (key, path) in [("resources.kg_nodes", &r.kg_nodes), ("resources.kg_edges", &r.kg_edges)] {
            match path {
                None => out.push(not_set(key, path)),
                Some(p) => match File::open(p) {
                    Ok(f) => files.push(f),
                    Err(e) => out.push(status(key, path, StatusLevel::Error, e.to_string())),
                },
            }
        }
        if let [nodes, edges] = &files[..] {
            out.push(match SynonymGraph::load(BufReader::new(nodes), BufReader::new(edges)) {
                Ok(g) => status(
                    "resources.kg_nodes",
                    &r.kg_nodes,
                    StatusLevel::Ok,
                    format!("{} nodes, {} edges", g.node_count(), g.edge_count()),
                ),
                Err(e) => status("resources.kg_nodes", &r.kg_nodes, StatusLevel::Error, e.to_string()),
            });
        }
    }

    if let Some(p) = &r.irregulars_path {
        let loaded = File::open(p)
            .map_err(|e| e.to_string())
            .and_then(|f| IrregularTable::parse(BufReader::new(f)).map_err(|e| e.to_string()));
        out.push(match loaded {
            Ok(t) => status("resources.irregulars_path", &r.irregulars_path, StatusLevel::Ok, format!("{} forms", t.len())),
            Err(e) => status("resources.irregulars_path", &r.irregulars_path, StatusLevel::Error, e),
        });
    }
    if let Some(p) = &r.pos_lexicon {
        out.push(match File::open(p).and_then(|f| PosLexicon::parse(BufReader::new(f))) {
            Ok(l) => status("resources.pos_lexicon", &r.pos_lexicon, StatusLevel::Ok, format!("{} words", l.len())),
            Err(e) => status("resources.pos_lexicon", &r.pos_lexicon, StatusLevel::Error, e.to_string()),
        });
    }
    match cfg.mlm.backend {
        MlmBackend::Stub => {
            if let Some(p) = &r.unigram_counts {
                let loaded = File::open(p)
                    .map_err(|e| e.to_string())
                    .and_then(|f| UnigramScorer::parse(BufReader::new(f)).map_err(|e| e.to_string()));
                out.push(match loaded {
                    Ok(s) => status("resources.unigram_counts", &r.unigram_counts, StatusLevel::Ok, format!("{} words", s.vocabulary_size())),
                    Err(e) => status("resources.unigram_counts", &r.unigram_counts, StatusLevel::Error, e),
                });
            }
        }
        MlmBackend::Remote => {
            let endpoint = cfg.mlm.endpoint.clone().map(PathBuf::from);
            out.push(match &cfg.mlm.endpoint {
                Some(_) => status("mlm.endpoint", &endpoint, StatusLevel::Ok, "remote scorer (not contacted)".into()),
                None => status("mlm.endpoint", &None, StatusLevel::Error, format!("not configured (or set {SCORER_URL_ENV})")),
            });
        }
    }
    out
}
