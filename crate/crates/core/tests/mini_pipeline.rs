// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use lexsimp::{evaluate, parse_dataset_tsv, parse_gold_tsv, run_dataset, AppConfig, MetricConfig, ModuleId};

fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources/mini")
}

#[test]
fn mini_run_scores_and_traces() {
    let cfg = AppConfig::load(&mini().join("mini.toml")).unwrap();
    let pipeline = cfg.pipeline_config().unwrap();
    let active = cfg.active_modules().unwrap();
    let res = cfg.load_resources(&active).unwrap();
    let text = fs::read_to_string(mini().join("dataset.tsv")).unwrap();
    let instances = parse_dataset_tsv(text.as_bytes()).unwrap();

    let outcomes = run_dataset(&instances, &res, &pipeline).unwrap();
    assert_eq!(outcomes.len(), instances.len());
    assert!(outcomes.iter().all(|o| o.issues().is_empty()));
    assert!(outcomes.iter().all(|o| o.record.substitutes().len() <= 5));
    // nouns never reach the verb lexicon
    let noun = outcomes.iter().find(|o| o.record.target == "physician").unwrap();
    assert!(!noun.invoked().contains(&ModuleId::Vsd));
    assert!(noun.invoked().contains(&ModuleId::Kg));

    let gold_text = fs::read_to_string(mini().join("gold.tsv")).unwrap();
    let gold = parse_gold_tsv(gold_text.as_bytes()).unwrap();
    let records: Vec<_> = outcomes.into_iter().map(|o| o.record).collect();
    let report = evaluate(&gold, &records, &MetricConfig::default()).unwrap();
    assert!(report.get("ACC@1").unwrap() >= 0.8);
    assert_eq!(report.get("Potential@5"), Some(1.0));
}
