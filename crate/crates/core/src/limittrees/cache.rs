use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::basischange::{substitute, Automorphism};
use crate::error::Result;
use crate::freewords::{Letter, Word};

/// Generator images of `α^k`, computed once per `k` and shared. Entries are
/// append-only; an optional directory keeps them across runs, keyed by the
/// automorphism's content hash and `k`.
pub struct IterateCache {
    alpha: Automorphism,
    hash: String,
    levels: RwLock<Vec<Arc<Vec<Word>>>>,
    dir: Option<PathBuf>,
    computed: AtomicUsize,
    warnings: Mutex<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    automorphism: String,
    k: usize,
    images: Vec<String>,
    checksum: String,
}

fn checksum(images: &[String]) -> String {
    let mut h = Sha256::new();
    for s in images {
        h.update(s.as_bytes());
        h.update(b"\n");
    }
    hex::encode(&h.finalize()[..8])
}

impl IterateCache {
    pub fn new(alpha: Automorphism, dir: Option<&Path>) -> Self {
        let gens: Vec<Word> = (0..alpha.rank()).map(|i| Word::letter(Letter::generator(i))).collect();
        IterateCache {
            hash: alpha.content_hash(),
            alpha,
            levels: RwLock::new(vec![Arc::new(gens)]),
            dir: dir.map(Path::to_path_buf),
            computed: AtomicUsize::new(0),
            warnings: Mutex::new(Vec::new()),
        }
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.alpha
    }

    /// Number of levels computed from scratch (not found in memory or on disk).
    pub fn computed_levels(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.warnings.lock().expect("warnings lock").clone()
    }

    fn entry_path(&self, k: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(&self.hash).join(format!("k{k}.json")))
    }

    fn load(&self, k: usize) -> Option<Vec<Word>> {
        let path = self.entry_path(k)?;
        let text = fs::read_to_string(&path).ok()?;
        let parsed: Option<Vec<Word>> = serde_json::from_str::<CacheEntry>(&text)
            .ok()
            .filter(|e| e.automorphism == self.hash && e.k == k && e.images.len() == self.alpha.rank())
            .filter(|e| checksum(&e.images) == e.checksum)
            .and_then(|e| {
                e.images
                    .iter()
                    .map(|s| self.alpha.target().parse_word(s).ok())
                    .collect()
            });
        if parsed.is_none() {
            self.warnings
                .lock()
                .expect("warnings lock")
                .push(format!("corrupt cache entry {} rebuilt", path.display()));
        }
        parsed
    }

    fn store(&self, k: usize, images: &[Word]) -> Result<()> {
        let Some(path) = self.entry_path(k) else {
            return Ok(());
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let strings: Vec<String> = images.iter().map(|w| self.alpha.target().format_word(w)).collect();
        let entry = CacheEntry {
            automorphism: self.hash.clone(),
            k,
            checksum: checksum(&strings),
            images: strings,
        };
        // write then rename so readers never see a partial file
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    /// Generator images of `α^k`.
    pub fn images(&self, k: usize) -> Result<Arc<Vec<Word>>> {
        if let Some(l) = self.levels.read().expect("cache lock").get(k) {
            return Ok(l.clone());
        }
        // single writer: extend level by level under the write lock
        let mut levels = self.levels.write().expect("cache lock");
        while levels.len() <= k {
            let next = levels.len();
            let imgs = match self.load(next) {
                Some(imgs) => imgs,
                None => {
                    let prev = levels.last().expect("level 0 present");
                    let imgs: Vec<Word> = prev.iter().map(|w| substitute(self.alpha.images(), w)).collect();
                    self.computed.fetch_add(1, Ordering::Relaxed);
                    self.store(next, &imgs)?;
                    imgs
                }
            };
            levels.push(Arc::new(imgs));
        }
        Ok(levels[k].clone())
    }

    /// `α^k(w)`.
    pub fn apply_power(&self, k: usize, w: &Word) -> Result<Word> {
        let imgs = self.images(k)?;
        Ok(substitute(&imgs, w))
    }
}
