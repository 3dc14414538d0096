//! Deterministic RNG stream derivation.
//!
//! Every randomised stage draws from its own stream derived from the global
//! seed, the document id and a stage label, so documents can be processed in
//! any order (or in parallel) without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derives an independent RNG for `(seed, doc_id, label)`.
pub fn stream_rng(seed: u64, doc_id: &str, label: &str) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update([0xff]);
    hasher.update(doc_id.as_bytes());
    hasher.update([0xfe]);
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(key)
}
