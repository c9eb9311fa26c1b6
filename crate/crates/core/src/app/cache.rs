//! Content-addressed cache of computed results: `<dir>/<hex key>.json`.

use super::json::to_canonical;
use crate::error::Result;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Bumped whenever cached payloads change meaning.
pub const CACHE_VERSION: &str = concat!("conecalc-", env!("CARGO_PKG_VERSION"), "-1");

pub const CACHE_ENV: &str = "CONECALC_CACHE";

/// Key over the canonical request, the depth and the cache version.
pub fn cache_key(request: &Value, depth: usize) -> String {
    let mut h = Sha256::new();
    h.update(CACHE_VERSION.as_bytes());
    h.update([0]);
    h.update(depth.to_le_bytes());
    h.update(to_canonical(request).as_bytes());
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lookup {
    Hit(Value),
    Miss,
    /// Present but unreadable; the message says why.
    Corrupt(String),
}

#[derive(Clone, Debug)]
pub struct Cache {
    pub dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Directory from the flag, else from `CONECALC_CACHE`.
    pub fn from_flag_or_env(flag: Option<&Path>) -> Option<Self> {
        flag.map(Path::to_path_buf).or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)).map(Self::new)
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Lookup {
        let path = self.path(key);
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        let v: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        if v.get("version").and_then(Value::as_str) != Some(CACHE_VERSION) || v.get("key").and_then(Value::as_str) != Some(key) {
            return Lookup::Corrupt(format!("{}: version or key mismatch", path.display()));
        }
        match v.get("payload") {
            Some(p) => Lookup::Hit(p.clone()),
            None => Lookup::Corrupt(format!("{}: no payload", path.display())),
        }
    }

    /// Writes through a temporary file and an atomic rename.
    #[cfg(not(target_arch = "wasm32"))]
    pub fn store(&self, key: &str, payload: &Value) -> Result<()> {
        use serde_json::json;
        use std::io::Write;
        std::fs::create_dir_all(&self.dir)?;
        let entry = json!({"version": CACHE_VERSION, "key": key, "payload": payload});
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(to_canonical(&entry).as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }

    #[cfg(target_arch = "wasm32")]
    pub fn store(&self, _key: &str, _payload: &Value) -> Result<()> {
        Err(crate::error::Error::InvalidInput("no file system for the cache".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn store_load_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(dir.path());
        let key = cache_key(&json!({"gamma": 0.5}), 3);
        assert_eq!(c.load(&key), Lookup::Miss);
        let payload = json!({"x": [1.5, 2]});
        c.store(&key, &payload).unwrap();
        assert_eq!(c.load(&key), Lookup::Hit(payload));
        let text = std::fs::read_to_string(c.path(&key)).unwrap();
        std::fs::write(c.path(&key), &text[..text.len() / 2]).unwrap();
        assert!(matches!(c.load(&key), Lookup::Corrupt(_)));
    }

    #[test]
    fn keys_depend_on_inputs() {
        let a = cache_key(&json!({"gamma": 0.5}), 3);
        assert_ne!(a, cache_key(&json!({"gamma": 0.25}), 3));
        assert_ne!(a, cache_key(&json!({"gamma": 0.5}), 4));
        assert_eq!(a, cache_key(&json!({"gamma": 0.5}), 3));
    }
}
