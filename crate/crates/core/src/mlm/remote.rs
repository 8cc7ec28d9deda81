// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

//! HTTP client for an external fill-mask server.
//!
//! `POST {endpoint}/v1/maskfill` with
//! `{"mode":"generate"|"score","left":..,"right":..,"top_n":..?,"candidates":[..]?}`,
//! answered by `{"results":[{"text":..,"log_prob":..}]}`.

use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{by_score_desc, MaskedContext, MaskedLmScorer, MlmError, ScoredText};

pub const MASKFILL_PATH: &str = "/v1/maskfill";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemoteConfig {
    /// Base URL used for scoring (and generation unless overridden).
    pub endpoint: String,
    pub generate_endpoint: Option<String>,
    pub timeout: Duration,
    /// Retries after the first attempt for transport failures and 5xx.
    pub retries: u32,
    pub backoff: Duration,
    pub max_concurrent: usize,
    /// Candidates per score request.
    pub max_batch: usize,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            generate_endpoint: None,
            timeout: Duration::from_secs(30),
            retries: 2,
            backoff: Duration::from_millis(200),
            max_concurrent: 4,
            max_batch: 64,
        }
    }
}

#[derive(Debug, Serialize)]
struct MaskFillRequest<'a> {
    mode: &'a str,
    left: &'a str,
    right: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    top_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    candidates: Option<&'a [String]>,
}

#[derive(Debug, Deserialize)]
struct MaskFillResponse {
    results: Vec<ScoredText>,
}

/// Counting semaphore bounding in-flight requests.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Gate {
    fn new(n: usize) -> Self {
        Gate {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn enter(&self) -> GatePass<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        GatePass(self)
    }
}

struct GatePass<'a>(&'a Gate);

impl Drop for GatePass<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

enum Attempt {
    Retry(MlmError),
    Fatal(MlmError),
}

#[derive(Debug)]
pub struct RemoteScorer {
    cfg: RemoteConfig,
    agent: ureq::Agent,
    gate: Gate,
}

impl RemoteScorer {
    pub fn new(cfg: RemoteConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(cfg.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let gate = Gate::new(cfg.max_concurrent);
        RemoteScorer { cfg, agent, gate }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.cfg
    }

    fn url(base: &str) -> String {
        format!("{}{}", base.trim_end_matches('/'), MASKFILL_PATH)
    }

    fn attempt(&self, url: &str, req: &MaskFillRequest<'_>) -> Result<Vec<ScoredText>, Attempt> {
        let _pass = self.gate.enter();
        let mut resp = self
            .agent
            .post(url)
            .send_json(req)
            .map_err(|e| Attempt::Retry(MlmError::Transport(e.to_string())))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            let err = MlmError::Status { status, body };
            return Err(if status >= 500 {
                Attempt::Retry(err)
            } else {
                Attempt::Fatal(err)
            });
        }
        let parsed: MaskFillResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| Attempt::Fatal(MlmError::Schema(e.to_string())))?;
        Ok(parsed.results)
    }

    fn post(&self, url: &str, req: &MaskFillRequest<'_>) -> Result<Vec<ScoredText>, MlmError> {
        let mut delay = self.cfg.backoff;
        let mut tries = 0;
        loop {
            match self.attempt(url, req) {
                Ok(results) => return Ok(results),
                Err(Attempt::Fatal(e)) => return Err(e),
                Err(Attempt::Retry(e)) if tries >= self.cfg.retries => return Err(e),
                Err(Attempt::Retry(e)) => {
                    log::debug!("scorer request failed ({e}), retrying in {delay:?}");
                    thread::sleep(delay);
                    delay *= 2;
                    tries += 1;
                }
            }
        }
    }
}

fn check_finite(results: &[ScoredText]) -> Result<(), MlmError> {
    match results.iter().find(|r| !r.log_prob.is_finite() || r.text.is_empty()) {
        Some(bad) => Err(MlmError::Schema(format!("invalid result {bad:?}"))),
        None => Ok(()),
    }
}

impl MaskedLmScorer for RemoteScorer {
    fn generate(&self, ctx: &MaskedContext, top_n: usize) -> Result<Vec<ScoredText>, MlmError> {
        let base = self.cfg.generate_endpoint.as_deref().unwrap_or(&self.cfg.endpoint);
        let req = MaskFillRequest {
            mode: "generate",
            left: &ctx.left,
            right: &ctx.right,
            top_n: Some(top_n),
            candidates: None,
        };
        let mut results = self.post(&Self::url(base), &req)?;
        if results.len() > top_n {
            return Err(MlmError::Schema(format!(
                "{} results for top_n={top_n}",
                results.len()
            )));
        }
        check_finite(&results)?;
        results.sort_by(by_score_desc);
        Ok(results)
    }

    fn score(&self, ctx: &MaskedContext, texts: &[String]) -> Result<Vec<ScoredText>, MlmError> {
        let url = Self::url(&self.cfg.endpoint);
        let mut out = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.cfg.max_batch.max(1)) {
            let req = MaskFillRequest {
                mode: "score",
                left: &ctx.left,
                right: &ctx.right,
                top_n: None,
                candidates: Some(chunk),
            };
            let results = self.post(&url, &req)?;
            if results.len() != chunk.len() {
                return Err(MlmError::Schema(format!(
                    "{} scores for {} candidates",
                    results.len(),
                    chunk.len()
                )));
            }
            check_finite(&results)?;
            if let Some((got, want)) = results
                .iter()
                .zip(chunk)
                .find(|(r, t)| r.text != **t)
            {
                return Err(MlmError::Schema(format!(
                    "result {:?} out of order, expected {want:?}",
                    got.text
                )));
            }
            out.extend(results);
        }
        Ok(out)
    }
}
