//! Sentence embeddings: providers, normalisation and caching.
//!
//! All vectors leaving this module are unit L2-normalised `f32` with cosine
//! computed in `f64`. Inputs are truncated to the provider's token cap before
//! encoding, and the cache key is derived from the truncated text so a hit is
//! always bit-identical to a recompute.

mod cache;
mod local;
mod remote;

pub use cache::VectorCache;
pub use local::{LocalHashEmbedder, NgramMode};
pub use remote::{RemoteClient, API_KEY_ENV};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segment::Tokenizer;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("input at position {position} produced a zero vector")]
    ZeroVector { position: usize },
    #[error("provider returned dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("embedding provider unavailable after {attempts} attempts: {reason}")]
    ProviderUnavailable { attempts: u32, reason: String },
    #[error("embedding cache error at {path}: {reason}")]
    Cache { path: PathBuf, reason: String },
    #[error("remote provider requires an endpoint URL")]
    MissingEndpoint,
}

/// Unit-norm embedding. Stored as `f32`, compared and combined in `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Vec<f32>,
}

impl Embedding {
    /// Normalises `raw` to unit L2 norm. Errors when the norm is numerically zero.
    pub fn normalized(raw: &[f64], position: usize) -> Result<Self, EmbedError> {
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(EmbedError::ZeroVector { position });
        }
        Ok(Embedding { values: raw.iter().map(|v| (v / norm) as f32).collect() })
    }

    /// Wraps already-normalised values, e.g. read back from the cache.
    pub fn from_unit(values: Vec<f32>) -> Self {
        Embedding { values }
    }

    /// Standard basis vector `e_{position mod dim}`: the deterministic stand-in
    /// for inputs that hash to the zero vector.
    pub fn basis(position: usize, dim: usize) -> Self {
        let mut values = vec![0.0f32; dim];
        values[position % dim] = 1.0;
        Embedding { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| (*v as f64) * (*v as f64)).sum::<f64>().sqrt()
    }

    pub fn bits_eq(&self, other: &Embedding) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Cosine similarity in `f64`. Panics in debug builds on dimension mismatch;
/// use `cosine_checked` at trust boundaries.
pub fn cosine(a: &Embedding, b: &Embedding) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    dot_f64(&a.values, &b.values)
}

pub fn cosine_checked(a: &Embedding, b: &Embedding) -> Result<f64, EmbedError> {
    if a.dim() != b.dim() {
        return Err(EmbedError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(dot_f64(&a.values, &b.values))
}

fn dot_f64(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x as f64) * (*y as f64)).sum()
}

/// Mean of unit embeddings, re-normalised. Used as the query stand-in when no
/// task query is supplied. Falls back to the first basis vector if the mean is
/// numerically zero (antipodal inputs).
pub fn document_centroid(embeddings: &[Embedding]) -> Embedding {
    let dim = embeddings[0].dim();
    let mut acc = vec![0.0f64; dim];
    for e in embeddings {
        for (a, v) in acc.iter_mut().zip(e.values()) {
            *a += *v as f64;
        }
    }
    let n = embeddings.len() as f64;
    for a in acc.iter_mut() {
        *a /= n;
    }
    Embedding::normalized(&acc, 0).unwrap_or_else(|_| Embedding::basis(0, dim))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    LocalHash,
    RemoteHttp,
}

/// Provider configuration. The defaults select the self-contained hashing
/// provider so the pipeline runs without network access.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub dimension: usize,
    pub max_input_tokens: usize,
    pub batch_size: usize,
    pub parallelism: usize,
    pub ngrams: NgramMode,
    pub endpoint: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub max_retries: u32,
    pub retry_base_ms: u64,
    pub timeout_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::LocalHash,
            dimension: 256,
            max_input_tokens: 512,
            batch_size: 64,
            parallelism: 4,
            ngrams: NgramMode::UnigramBigram,
            endpoint: None,
            cache_dir: None,
            max_retries: 3,
            retry_base_ms: 250,
            timeout_ms: 30_000,
        }
    }
}

impl ProviderConfig {
    /// Stable tag identifying the vector-producing function; part of the cache key.
    fn provider_tag(&self) -> String {
        match self.kind {
            ProviderKind::LocalHash => match self.ngrams {
                NgramMode::Unigram => "local-hash/uni".to_string(),
                NgramMode::UnigramBigram => "local-hash/uni+bi".to_string(),
            },
            ProviderKind::RemoteHttp => "remote-http".to_string(),
        }
    }
}

enum Backend {
    Local(LocalHashEmbedder),
    Remote(RemoteClient),
}

/// Front door for embedding text: truncates, consults the cache, dispatches to
/// the configured backend and substitutes basis vectors for degenerate inputs.
pub struct Embedder {
    config: ProviderConfig,
    backend: Backend,
    cache: Option<VectorCache>,
}

impl Embedder {
    pub fn new(config: ProviderConfig) -> Result<Self, EmbedError> {
        let backend = match config.kind {
            ProviderKind::LocalHash => {
                Backend::Local(LocalHashEmbedder::new(config.dimension, config.ngrams))
            }
            ProviderKind::RemoteHttp => {
                let endpoint = config.endpoint.clone().ok_or(EmbedError::MissingEndpoint)?;
                Backend::Remote(RemoteClient::new(
                    endpoint,
                    config.dimension,
                    config.max_retries,
                    config.retry_base_ms,
                    config.timeout_ms,
                )?)
            }
        };
        let cache = match &config.cache_dir {
            Some(dir) => Some(VectorCache::open(dir, config.dimension)?),
            None => None,
        };
        Ok(Embedder { config, backend, cache })
    }

    pub fn dimension(&self) -> usize {
        self.config.dimension
    }

    /// Embeds `texts` in order. Zero-vector inputs (no hashable content, or a
    /// provider response with zero norm) become basis vectors keyed by input
    /// position instead of failing the whole document.
    pub fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Embedding>, EmbedError> {
        let tokenizer = Tokenizer::whitespace_punct();
        let truncated: Vec<&str> = texts
            .iter()
            .map(|t| tokenizer.truncate(t, self.config.max_input_tokens))
            .collect();

        let mut out: Vec<Option<Embedding>> = vec![None; texts.len()];
        let mut misses: Vec<usize> = Vec::new();
        let tag = self.config.provider_tag();

        if let Some(cache) = &self.cache {
            for (i, text) in truncated.iter().enumerate() {
                match cache.get(&tag, text)? {
                    Some(values) => out[i] = Some(Embedding::from_unit(values)),
                    None => misses.push(i),
                }
            }
        } else {
            misses = (0..texts.len()).collect();
        }

        if !misses.is_empty() {
            let pending: Vec<&str> = misses.iter().map(|&i| truncated[i]).collect();
            let raw = match &self.backend {
                Backend::Local(local) => local.embed(&pending),
                Backend::Remote(remote) => remote.embed(
                    &pending,
                    self.config.batch_size,
                    self.config.parallelism,
                )?,
            };
            debug_assert_eq!(raw.len(), pending.len());
            for (slot, vector) in misses.iter().zip(raw) {
                let emb = match Embedding::normalized(&vector, *slot) {
                    Ok(e) => e,
                    Err(EmbedError::ZeroVector { .. }) => {
                        Embedding::basis(*slot, self.config.dimension)
                    }
                    Err(e) => return Err(e),
                };
                if let Some(cache) = &self.cache {
                    cache.put(&tag, truncated[*slot], emb.values())?;
                }
                out[*slot] = Some(emb);
            }
        }

        Ok(out.into_iter().map(|e| e.expect("all slots filled")).collect())
    }

    pub fn embed_one(&self, text: &str) -> Result<Embedding, EmbedError> {
        Ok(self.embed_batch(&[text])?.pop().expect("one output"))
    }
}
