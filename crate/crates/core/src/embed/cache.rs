//! Content-addressed on-disk vector cache.
//!
//! One file per vector, named by the SHA-256 of (provider tag, dimension,
//! truncated input text). File layout: 4-byte magic `CXEV`, `u32` LE dimension,
//! `u64` LE reserved, then `dimension` little-endian `f32` values. Writes go
//! through a temp file plus rename so concurrent readers never observe a
//! partial vector.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use sha2::{Digest, Sha256};

use super::EmbedError;

const MAGIC: &[u8; 4] = b"CXEV";
const HEADER_LEN: usize = 16;

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Debug)]
pub struct VectorCache {
    dir: PathBuf,
    dim: usize,
}

impl VectorCache {
    pub fn open(dir: &Path, dim: usize) -> Result<Self, EmbedError> {
        fs::create_dir_all(dir).map_err(|e| EmbedError::Cache {
            path: dir.to_path_buf(),
            reason: format!("create dir: {e}"),
        })?;
        Ok(VectorCache { dir: dir.to_path_buf(), dim })
    }

    fn path_for(&self, provider_tag: &str, text: &str) -> PathBuf {
        let mut hasher = Sha256::new();
        hasher.update(provider_tag.as_bytes());
        hasher.update([0x00]);
        hasher.update((self.dim as u32).to_le_bytes());
        hasher.update([0x00]);
        hasher.update(text.as_bytes());
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{hex}.cxev"))
    }

    /// Returns the cached vector for (tag, text), or `None` on a miss. A file
    /// with a bad magic, dimension or length is reported as a cache error
    /// rather than silently re-embedded, since it signals cache corruption.
    pub fn get(&self, provider_tag: &str, text: &str) -> Result<Option<Vec<f32>>, EmbedError> {
        let path = self.path_for(provider_tag, text);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => {
                return Err(EmbedError::Cache { path, reason: format!("read: {e}") });
            }
        };
        if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
            return Err(EmbedError::Cache { path, reason: "bad header".to_string() });
        }
        let dim = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        if dim != self.dim {
            return Err(EmbedError::Cache {
                path,
                reason: format!("dimension {dim} does not match configured {}", self.dim),
            });
        }
        let body = &bytes[HEADER_LEN..];
        if body.len() != dim * 4 {
            return Err(EmbedError::Cache { path, reason: "truncated body".to_string() });
        }
        let mut values = Vec::with_capacity(dim);
        for chunk in body.chunks_exact(4) {
            values.push(f32::from_le_bytes(chunk.try_into().unwrap()));
        }
        Ok(Some(values))
    }

    pub fn put(&self, provider_tag: &str, text: &str, values: &[f32]) -> Result<(), EmbedError> {
        let path = self.path_for(provider_tag, text);
        let mut bytes = Vec::with_capacity(HEADER_LEN + values.len() * 4);
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&(self.dim as u32).to_le_bytes());
        bytes.extend_from_slice(&0u64.to_le_bytes());
        for v in values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let write = (|| -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&bytes)?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        })();
        if let Err(e) = write {
            let _ = fs::remove_file(&tmp);
            return Err(EmbedError::Cache { path, reason: format!("write: {e}") });
        }
        Ok(())
    }
}
