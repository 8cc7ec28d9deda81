// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Substitute-ranking metrics: MAP@K, Potential@K, ACC@K@Top1 and ACC@1.
//!
//! Predictions match gold annotations after trimming and case folding only.
//! AP@K is normalized by the constant K, so a five-item list scores exactly
//! half as much at K=10 as at K=5.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufReader};
use std::path::Path;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::data::{gold_top1_set, parse_gold_tsv, parse_run_tsv, DataError, GoldInstance, PredictionRecord};
use crate::text::normalize;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no instances to evaluate")]
    Empty,
    #[error("gold has {gold} instances but the run has {run}")]
    CountMismatch { gold: usize, run: usize },
    #[error("run record {record} ({found:?}) does not pair with gold line {gold_line} ({expected:?})")]
    Pairing {
        record: usize,
        gold_line: usize,
        expected: String,
        found: String,
    },
    #[error("invalid metric cutoffs for {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("{path}: {source}")]
    Data {
        path: String,
        #[source]
        source: DataError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    pub map_k: Vec<usize>,
    pub potential_k: Vec<usize>,
    pub acc_top1_k: Vec<usize>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            map_k: vec![1, 3, 5, 10],
            potential_k: vec![1, 3, 5, 10],
            acc_top1_k: vec![1, 2, 3],
        }
    }
}

fn check_cutoffs(field: &'static str, ks: &[usize]) -> Result<(), EvalError> {
    if ks.contains(&0) {
        return Err(EvalError::Config {
            field,
            reason: "cutoffs must be positive".into(),
        });
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::Config {
            field,
            reason: format!("cutoffs must be strictly increasing, got {ks:?}"),
        });
    }
    Ok(())
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        check_cutoffs("map_k", &self.map_k)?;
        check_cutoffs("potential_k", &self.potential_k)?;
        check_cutoffs("acc_top1_k", &self.acc_top1_k)
    }

    fn max_k(&self) -> usize {
        self.map_k
            .iter()
            .chain(&self.potential_k)
            .chain(&self.acc_top1_k)
            .copied()
            .max()
            .unwrap_or(1)
            .max(1)
    }
}

/// Relevance of the first `min(k, |preds|)` predictions against `gold_set`
/// (already normalized).
pub fn relevance_vector(preds: &[String], gold_set: &BTreeSet<String>, k: usize) -> Vec<bool> {
    preds
        .iter()
        .take(k)
        .map(|p| gold_set.contains(&normalize(p)))
        .collect()
}

/// Σ rel(i)·P(i) over the vector, before dividing by K.
fn precision_sum(rel: &[bool]) -> f64 {
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, &r) in rel.iter().enumerate() {
        if r {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum
}

/// AP@K = (1/K) Σ_i rel(i)·P(i).
pub fn average_precision_at_k(rel: &[bool], k: usize) -> f64 {
    debug_assert!(rel.len() <= k);
    if k == 0 {
        return 0.0;
    }
    precision_sum(&rel[..rel.len().min(k)]) / k as f64
}

/// What one instance contributed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceBreakdown {
    pub context: String,
    pub target: String,
    /// Relevance of each prediction up to the largest cutoff.
    pub relevance: Vec<bool>,
    /// 1-based rank of the first prediction in the top-1 gold set.
    pub first_top1_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Metric name and value, in reporting order.
    pub metrics: Vec<(String, f64)>,
    pub instances: usize,
    pub per_instance: Vec<InstanceBreakdown>,
}

struct MetricMap<'a>(&'a [(String, f64)]);

impl Serialize for MetricMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Serialize for EvaluationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EvaluationReport", 2)?;
        st.serialize_field("metrics", &MetricMap(&self.metrics))?;
        st.serialize_field("instances", &self.instances)?;
        st.end()
    }
}

impl EvaluationReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Two aligned columns, four decimals.
    pub fn to_table(&self) -> String {
        let width = self.metrics.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(6);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  value", "metric");
        for (name, v) in &self.metrics {
            let _ = writeln!(out, "{name:<width$}  {v:.4}");
        }
        let _ = writeln!(out, "{:<width$}  {}", "instances", self.instances);
        out
    }
}

fn check_pairing(gold: &[GoldInstance], run: &[PredictionRecord]) -> Result<(), EvalError> {
    if gold.is_empty() {
        return Err(EvalError::Empty);
    }
    if gold.len() != run.len() {
        return Err(EvalError::CountMismatch {
            gold: gold.len(),
            run: run.len(),
        });
    }
    for (i, (g, r)) in gold.iter().zip(run).enumerate() {
        let (gc, gt) = g.instance.key();
        let (rc, rt) = r.key();
        if gc.trim() != rc.trim() || gt.trim() != rt.trim() {
            return Err(EvalError::Pairing {
                record: i + 1,
                gold_line: g.line,
                expected: format!("{gc}\t{gt}"),
                found: format!("{rc}\t{rt}"),
            });
        }
    }
    Ok(())
}

/// Scores `run` against `gold`, paired line by line.
pub fn evaluate(
    gold: &[GoldInstance],
    run: &[PredictionRecord],
    cfg: &MetricConfig,
) -> Result<EvaluationReport, EvalError> {
    cfg.validate()?;
    check_pairing(gold, run)?;
    let max_k = cfg.max_k();
    let per_instance: Vec<InstanceBreakdown> = gold
        .iter()
        .zip(run)
        .map(|(g, r)| {
            let preds = r.substitutes();
            let top1 = gold_top1_set(g);
            InstanceBreakdown {
                context: r.context.clone(),
                target: r.target.clone(),
                relevance: relevance_vector(preds, &g.gold_set(), max_k),
                first_top1_rank: preds.iter().position(|p| top1.contains(&normalize(p))).map(|i| i + 1),
            }
        })
        .collect();

    let n = per_instance.len();
    let hit_within = |k: usize| per_instance.iter().filter(|b| b.relevance.iter().take(k).any(|&r| r)).count();
    let mean = |count: usize| count as f64 / n as f64;

    let mut metrics = vec![("ACC@1".to_string(), mean(hit_within(1)))];
    for &k in &cfg.acc_top1_k {
        let count = per_instance
            .iter()
            .filter(|b| b.first_top1_rank.is_some_and(|r| r <= k))
            .count();
        metrics.push((format!("ACC@{k}@Top1"), mean(count)));
    }
    for &k in &cfg.map_k {
        // dividing the summed terms once by K·n keeps MAP@2K = MAP@K / 2
        // exact when no list is longer than K
        let total: f64 = per_instance
            .iter()
            .map(|b| precision_sum(&b.relevance[..b.relevance.len().min(k)]))
            .sum();
        metrics.push((format!("MAP@{k}"), total / (k * n) as f64));
    }
    for &k in cfg.potential_k.iter().filter(|&&k| k != 1) {
        metrics.push((format!("Potential@{k}"), mean(hit_within(k))));
    }
    Ok(EvaluationReport {
        metrics,
        instances: n,
        per_instance,
    })
}

fn open(path: &Path) -> Result<BufReader<File>, EvalError> {
    File::open(path).map(BufReader::new).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Parses both files and evaluates.
pub fn evaluate_files(gold: &Path, run: &Path, cfg: &MetricConfig) -> Result<EvaluationReport, EvalError> {
    let data_err = |path: &Path| {
        let path = path.display().to_string();
        move |source| EvalError::Data { path, source }
    };
    let gold_records = parse_gold_tsv(open(gold)?).map_err(data_err(gold))?;
    let run_file = parse_run_tsv(open(run)?).map_err(data_err(run))?;
    evaluate(&gold_records, &run_file.records, cfg)
}
