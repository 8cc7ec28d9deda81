// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Lexical simplification: candidate generation from several sources,
//! inflection matching, masked-LM re-ranking, and ranking metrics.

pub mod candidate;
pub mod config;
pub mod data;
pub mod inflect;
pub mod kg;
pub mod metrics;
pub mod mlm;
pub mod pipeline;
pub mod pos;
pub mod ppdb;
pub mod text;
pub mod verbnet;
pub mod vsd;

pub use candidate::Candidate;
pub use config::{AppConfig, ConfigError};
pub use data::{
    gold_top1_set, parse_dataset_tsv, parse_gold_tsv, parse_run_tsv, write_run_tsv, DataError, GoldInstance,
    Instance, PosCategory, PredictionRecord, RunFile, TargetSpan,
};
pub use inflect::{InflectionForm, Inflector, IrregularTable};
pub use metrics::{evaluate, evaluate_files, EvalError, EvaluationReport, MetricConfig};
pub use mlm::{MaskedContext, MaskedLmScorer, MlmError, ScoredText, UnigramScorer};
pub use pipeline::{run_dataset, run_instance, InstanceOutcome, PipelineConfig, Resources, RunSummary};
pub use pos::{ContextualPosTagger, LexiconTagger, ModuleId, RoutingConfig, RoutingProfile};
pub use text::normalize;
