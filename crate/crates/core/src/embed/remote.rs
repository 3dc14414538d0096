//! HTTP embedding provider.
//!
//! Speaks a minimal JSON protocol: `POST endpoint` with `{"inputs": [...]}`
//! returns `{"vectors": [[...], ...]}` in input order. Transport errors and
//! 5xx responses are retried with exponential backoff; 4xx responses fail
//! immediately since retrying cannot fix the request. The API key, if any,
//! comes from the `CTXPRESS_EMBED_API_KEY` environment variable.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::EmbedError;

pub const API_KEY_ENV: &str = "CTXPRESS_EMBED_API_KEY";

#[derive(Serialize)]
struct EmbedRequest<'a> {
    inputs: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

pub struct RemoteClient {
    client: reqwest::blocking::Client,
    endpoint: String,
    dim: usize,
    max_retries: u32,
    retry_base_ms: u64,
    api_key: Option<String>,
}

impl RemoteClient {
    pub fn new(
        endpoint: String,
        dim: usize,
        max_retries: u32,
        retry_base_ms: u64,
        timeout_ms: u64,
    ) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_millis(timeout_ms))
            .build()
            .map_err(|e| EmbedError::ProviderUnavailable { attempts: 0, reason: e.to_string() })?;
        Ok(RemoteClient {
            client,
            endpoint,
            dim,
            max_retries,
            retry_base_ms,
            api_key: std::env::var(API_KEY_ENV).ok(),
        })
    }

    /// Embeds `texts`, splitting into batches of `batch_size` and issuing up to
    /// `parallelism` requests at a time. Output keeps input order; on failure
    /// the error of the earliest failing batch is returned.
    pub fn embed(
        &self,
        texts: &[&str],
        batch_size: usize,
        parallelism: usize,
    ) -> Result<Vec<Vec<f64>>, EmbedError> {
        type BatchResult = Result<Vec<Vec<f64>>, EmbedError>;
        let batch_size = batch_size.max(1);
        let batches: Vec<&[&str]> = texts.chunks(batch_size).collect();
        let results: Mutex<Vec<Option<BatchResult>>> =
            Mutex::new((0..batches.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        let workers = parallelism.max(1).min(batches.len().max(1));

        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, Ordering::Relaxed);
                    if idx >= batches.len() {
                        break;
                    }
                    let outcome = self.embed_batch(batches[idx]);
                    results.lock().unwrap()[idx] = Some(outcome);
                });
            }
        });

        let mut out = Vec::with_capacity(texts.len());
        for slot in results.into_inner().unwrap() {
            out.extend(slot.expect("batch processed")?);
        }
        Ok(out)
    }

    fn embed_batch(&self, inputs: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let mut last_reason = String::new();
        let mut attempts = 0;
        while attempts <= self.max_retries {
            if attempts > 0 {
                let backoff = self.retry_base_ms.saturating_mul(1 << (attempts - 1));
                std::thread::sleep(std::time::Duration::from_millis(backoff));
            }
            attempts += 1;
            let mut request = self
                .client
                .post(&self.endpoint)
                .json(&EmbedRequest { inputs });
            if let Some(key) = &self.api_key {
                request = request.bearer_auth(key);
            }
            match request.send() {
                Ok(response) => {
                    let status = response.status();
                    if status.is_success() {
                        let parsed: EmbedResponse = response.json().map_err(|e| {
                            EmbedError::ProviderUnavailable {
                                attempts,
                                reason: format!("malformed response body: {e}"),
                            }
                        })?;
                        return self.validate(parsed, inputs.len());
                    }
                    last_reason = format!("HTTP {status}");
                    if status.is_client_error() {
                        return Err(EmbedError::ProviderUnavailable { attempts, reason: last_reason });
                    }
                }
                Err(e) => {
                    last_reason = e.to_string();
                }
            }
        }
        Err(EmbedError::ProviderUnavailable { attempts, reason: last_reason })
    }

    fn validate(&self, parsed: EmbedResponse, expected: usize) -> Result<Vec<Vec<f64>>, EmbedError> {
        if parsed.vectors.len() != expected {
            return Err(EmbedError::ProviderUnavailable {
                attempts: 1,
                reason: format!("expected {expected} vectors, got {}", parsed.vectors.len()),
            });
        }
        for v in &parsed.vectors {
            if v.len() != self.dim {
                return Err(EmbedError::DimensionMismatch { expected: self.dim, got: v.len() });
            }
        }
        Ok(parsed.vectors)
    }
}
