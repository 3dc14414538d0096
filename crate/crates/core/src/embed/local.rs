//! Self-contained hashing embedder.
//!
//! Tokens are lowercased whitespace/punctuation tokens; unigram (and optionally
//! adjacent bigram) features are hashed with FNV-1a into `dim` signed buckets.
//! The hash is fixed rather than process-dependent so vectors are stable across
//! runs, platforms and cache generations.

use serde::{Deserialize, Serialize};

use crate::segment::whitespace_punct_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NgramMode {
    Unigram,
    UnigramBigram,
}

#[derive(Debug, Clone)]
pub struct LocalHashEmbedder {
    dim: usize,
    ngrams: NgramMode,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for b in bytes {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

impl LocalHashEmbedder {
    pub fn new(dim: usize, ngrams: NgramMode) -> Self {
        LocalHashEmbedder { dim, ngrams }
    }

    /// Raw (unnormalised) feature vectors, one per input, in input order.
    pub fn embed(&self, texts: &[&str]) -> Vec<Vec<f64>> {
        texts.iter().map(|t| self.embed_text(t)).collect()
    }

    fn embed_text(&self, text: &str) -> Vec<f64> {
        let lowered = text.to_lowercase();
        let tokens = whitespace_punct_tokens(&lowered);

        let mut acc = vec![0.0f64; self.dim];
        for token in &tokens {
            self.bump(&mut acc, token.as_bytes());
        }
        if self.ngrams == NgramMode::UnigramBigram {
            for pair in tokens.windows(2) {
                let mut feature = Vec::with_capacity(pair[0].len() + 1 + pair[1].len());
                feature.extend_from_slice(pair[0].as_bytes());
                feature.push(0x1f);
                feature.extend_from_slice(pair[1].as_bytes());
                self.bump(&mut acc, &feature);
            }
        }
        acc
    }

    fn bump(&self, acc: &mut [f64], feature: &[u8]) {
        let h = fnv1a64(feature);
        let bucket = ((h >> 1) % self.dim as u64) as usize;
        let sign = if h & 1 == 1 { -1.0 } else { 1.0 };
        acc[bucket] += sign;
    }
}
