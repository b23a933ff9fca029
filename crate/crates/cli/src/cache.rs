//! Disk-backed memoization of JSON results under `M24_CACHE_DIR`.
//!
//! An entry is one file named by the SHA-256 of its key. The first line holds the SHA-256 of
//! the payload; entries whose checksum does not match are discarded and recomputed. A producer
//! writes to a private temporary file and hard-links it into place, so exactly one producer
//! per key wins and every caller returns the winner's bytes.

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub struct Cache {
    dir: PathBuf,
}

/// Whether a value came from disk or was just computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Hit,
    Computed,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    pub fn from_env() -> Option<Cache> {
        std::env::var_os("M24_CACHE_DIR").map(|d| Cache::at(Path::new(&d)))
    }

    pub fn at(dir: &Path) -> Cache {
        Cache { dir: dir.to_path_buf() }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.json", digest(key.as_bytes())))
    }

    fn read(&self, path: &Path) -> Option<String> {
        let text = fs::read_to_string(path).ok()?;
        let (sum, payload) = text.split_once('\n')?;
        (digest(payload.as_bytes()) == sum).then(|| payload.to_string())
    }

    /// The cached payload for `key`, computing and storing it on a miss.
    pub fn get_or_compute(&self, key: &str, produce: impl FnOnce() -> Result<String>) -> Result<(String, Source)> {
        let path = self.path(key);
        if let Some(v) = self.read(&path) {
            return Ok((v, Source::Hit));
        }
        let payload = produce()?;
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        write!(tmp, "{}\n{}", digest(payload.as_bytes()), payload)?;
        tmp.flush()?;
        // a corrupt entry in the way is removed first
        if path.exists() && self.read(&path).is_none() {
            let _ = fs::remove_file(&path);
        }
        match fs::hard_link(tmp.path(), &path) {
            Ok(()) => Ok((payload, Source::Computed)),
            Err(_) => match self.read(&path) {
                Some(winner) => Ok((winner, Source::Computed)),
                None => Ok((payload, Source::Computed)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    #[test]
    fn second_call_is_a_hit() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path());
        let (a, s1) = c.get_or_compute("k", || Ok("value".into())).unwrap();
        let (b, s2) = c.get_or_compute("k", || panic!("must not recompute")).unwrap();
        assert_eq!((a.as_str(), s1, b.as_str(), s2), ("value", Source::Computed, "value", Source::Hit));
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::at(dir.path());
        c.get_or_compute("k", || Ok("value".into())).unwrap();
        fs::write(c.path("k"), "garbage\nvalue").unwrap();
        let (v, s) = c.get_or_compute("k", || Ok("fresh".into())).unwrap();
        assert_eq!((v.as_str(), s), ("fresh", Source::Computed));
        assert_eq!(c.get_or_compute("k", || panic!()).unwrap().0, "fresh");
    }

    #[test]
    fn concurrent_producers_agree() {
        let dir = tempfile::tempdir().unwrap();
        let calls = Arc::new(AtomicUsize::new(0));
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let (d, calls) = (dir.path().to_path_buf(), calls.clone());
                std::thread::spawn(move || {
                    Cache::at(&d)
                        .get_or_compute("shared", || {
                            calls.fetch_add(1, Ordering::SeqCst);
                            Ok(format!("producer {i}"))
                        })
                        .unwrap()
                        .0
                })
            })
            .collect();
        let values: Vec<String> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(values.iter().all(|v| *v == values[0]));
        assert!(calls.load(Ordering::SeqCst) >= 1);
    }
}
