// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared fixtures for the benchmarks.

use std::path::{Path, PathBuf};

use lexsimp::{GoldInstance, Instance, PredictionRecord};

pub fn mini_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../resources/mini")
}

const WORDS: [&str; 10] = ["easy", "simple", "clear", "plain", "basic", "light", "soft", "quick", "small", "short"];

/// Deterministic gold/run pair of `n` instances with 10 predictions each.
pub fn synthetic_eval(n: usize) -> (Vec<GoldInstance>, Vec<PredictionRecord>) {
    let mut gold = Vec::with_capacity(n);
    let mut run = Vec::with_capacity(n);
    for i in 0..n {
        let context = format!("line {i} has a target");
        let annotations = (0..6).map(|j| WORDS[(i * 7 + j * 3) % WORDS.len()].to_string()).collect();
        gold.push(GoldInstance {
            instance: Instance::new(context.clone(), "target").unwrap(),
            annotations,
            line: i + 1,
        });
        let preds = (0..10).map(|j| WORDS[(i + j) % WORDS.len()].to_string());
        run.push(PredictionRecord::new(context, "target", preds).0);
    }
    (gold, run)
}
