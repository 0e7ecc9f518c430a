//! On-disk memo of fixture results: one file per `(module, key)`, first line
//! `sha256 <hex of body>`, then the JSON body. Files that fail the checksum
//! or do not parse are recomputed and overwritten.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Serializes writers within the process; across processes the rename is
/// atomic, so readers see an old file or a new one.
static WRITE_LOCK: Mutex<()> = Mutex::new(());

pub const DEFAULT_CACHE_DIR: &str = ".cohomgrowth-cache";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// A file existed but was corrupt.
    Recovered,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn checksum(body: &[u8]) -> String {
    hex::encode(Sha256::digest(body))
}

/// File-name-safe rendering of a key.
fn sanitize(key: &str) -> String {
    key.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.=".contains(c) { c } else { '_' }).collect()
}

enum Lookup<T> {
    Found(T),
    Absent,
    Corrupt,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::Cache(format!("{}: {e}", dir.display())))?;
        Ok(Cache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Distinct keys can sanitize to the same stem, so a hash suffix keeps
    /// them apart.
    pub fn path(&self, module: &str, key: &str) -> PathBuf {
        let tag = &checksum(key.as_bytes())[..8];
        self.dir.join(sanitize(module)).join(format!("{}-{tag}.json", sanitize(key)))
    }

    fn lookup<T: DeserializeOwned>(&self, path: &Path) -> Lookup<T> {
        let Ok(text) = fs::read_to_string(path) else {
            return Lookup::Absent;
        };
        let Some((head, body)) = text.split_once('\n') else {
            return Lookup::Corrupt;
        };
        if head.strip_prefix("sha256 ") != Some(checksum(body.as_bytes()).as_str()) {
            return Lookup::Corrupt;
        }
        serde_json::from_str(body).map_or(Lookup::Corrupt, Lookup::Found)
    }

    pub fn load<T: DeserializeOwned>(&self, module: &str, key: &str) -> Option<T> {
        match self.lookup(&self.path(module, key)) {
            Lookup::Found(v) => Some(v),
            Lookup::Absent | Lookup::Corrupt => None,
        }
    }

    pub fn store<T: Serialize>(&self, module: &str, key: &str, value: &T) -> Result<()> {
        let path = self.path(module, key);
        let parent = path.parent().expect("cache paths have a parent");
        let body = serde_json::to_string(value).map_err(|e| Error::Cache(e.to_string()))?;
        let text = format!("sha256 {}\n{body}", checksum(body.as_bytes()));
        let _guard = WRITE_LOCK.lock().unwrap_or_else(|p| p.into_inner());
        fs::create_dir_all(parent).map_err(|e| Error::Cache(format!("{}: {e}", parent.display())))?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, text).map_err(|e| Error::Cache(format!("{}: {e}", tmp.display())))?;
        fs::rename(&tmp, &path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    pub fn get_or_compute<T, F>(&self, module: &str, key: &str, compute: F) -> Result<(T, CacheStatus)>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let status = match self.lookup(&self.path(module, key)) {
            Lookup::Found(v) => return Ok((v, CacheStatus::Hit)),
            Lookup::Absent => CacheStatus::Miss,
            Lookup::Corrupt => CacheStatus::Recovered,
        };
        let value = compute()?;
        self.store(module, key, &value)?;
        Ok((value, status))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hit_after_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        let (v, s) = cache.get_or_compute("gl2", "p=3 a=1", || Ok(vec![3u32])).unwrap();
        assert_eq!((v, s), (vec![3], CacheStatus::Miss));
        let (v, s) = cache.get_or_compute("gl2", "p=3 a=1", || -> Result<Vec<u32>> { panic!("cached") }).unwrap();
        assert_eq!((v, s), (vec![3], CacheStatus::Hit));
    }

    #[test]
    fn corruption_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        cache.store("m", "k", &41u32).unwrap();
        let path = cache.path("m", "k");
        let text = fs::read_to_string(&path).unwrap().replace("41", "42");
        fs::write(&path, text).unwrap();
        assert_eq!(cache.load::<u32>("m", "k"), None);
        let (v, s) = cache.get_or_compute("m", "k", || Ok(41u32)).unwrap();
        assert_eq!((v, s), (41, CacheStatus::Recovered));
        assert_eq!(cache.load::<u32>("m", "k"), Some(41));
    }

    #[test]
    fn keys_with_same_stem_stay_apart() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path()).unwrap();
        assert_ne!(cache.path("m", "a/b"), cache.path("m", "a:b"));
    }
}
