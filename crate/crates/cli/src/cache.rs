//! Append-only JSON-lines store of oracle values.
//!
//! Each line is one [`CacheEntry`]. Readers take a shared advisory lock and
//! writers an exclusive one; a later line for the same key wins on read, but
//! a write that disagrees with the stored value is refused.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use turan_core::oracle::{ExStore, ExValue};
use turan_core::{Error, Result};

pub const CACHE_ENV: &str = "TURAN_CACHE";
pub const DEFAULT_CACHE: &str = "turan-cache.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub m: usize,
    pub family_key: String,
    pub ex_value: ExValue,
    pub witness_count: u64,
    pub tool_version: String,
}

/// Cache path from an explicit flag, then `TURAN_CACHE`, then the default.
pub fn resolve_path(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE)),
    }
}

#[derive(Debug, Clone)]
pub struct JsonlStore {
    path: PathBuf,
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Cache(format!("{}: {e}", path.display()))
}

impl JsonlStore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        JsonlStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Every readable entry in file order; corrupt lines are reported and skipped.
    fn scan(&self, file: &File) -> Result<Vec<CacheEntry>> {
        let mut entries = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_error(&self.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<CacheEntry>(&line) {
                Ok(entry) => entries.push(entry),
                Err(e) => eprintln!(
                    "warning: {}:{}: skipping corrupt cache line: {e}",
                    self.path.display(),
                    i + 1
                ),
            }
        }
        Ok(entries)
    }

    /// Newest entry for `(m, family_key)`.
    pub fn get_entry(&self, m: usize, family_key: &str) -> Result<Option<CacheEntry>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_error(&self.path, e)),
        };
        file.lock_shared().map_err(|e| io_error(&self.path, e))?;
        let entries = self.scan(&file)?;
        Ok(entries
            .into_iter()
            .rev()
            .find(|e| e.m == m && e.family_key == family_key))
    }

    /// Appends `entry` unless an equal one is stored; a conflicting value is an error.
    pub fn put_entry(&self, entry: &CacheEntry) -> Result<()> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&self.path)
            .map_err(|e| io_error(&self.path, e))?;
        file.lock().map_err(|e| io_error(&self.path, e))?;
        let existing = self.scan(&file)?;
        if let Some(old) = existing
            .iter()
            .rev()
            .find(|e| e.m == entry.m && e.family_key == entry.family_key)
        {
            if old.ex_value != entry.ex_value || old.witness_count != entry.witness_count {
                return Err(Error::Cache(format!(
                    "conflicting entry for ex({}, {}): stored {} ({} witnesses), new {} ({} witnesses)",
                    entry.m, entry.family_key, old.ex_value, old.witness_count, entry.ex_value, entry.witness_count
                )));
            }
            return Ok(());
        }
        let line = serde_json::to_string(entry).expect("cache entries serialize");
        writeln!(file, "{line}")
            .and_then(|_| file.flush())
            .map_err(|e| io_error(&self.path, e))
    }
}

impl ExStore for JsonlStore {
    fn get(&self, m: usize, family_key: &str) -> Result<Option<ExValue>> {
        Ok(self.get_entry(m, family_key)?.map(|e| e.ex_value))
    }

    fn put(&self, m: usize, family_key: &str, value: ExValue, witness_count: u64) -> Result<()> {
        self.put_entry(&CacheEntry {
            m,
            family_key: family_key.to_string(),
            ex_value: value,
            witness_count,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(m: usize, key: &str, ex: u64) -> CacheEntry {
        CacheEntry {
            m,
            family_key: key.into(),
            ex_value: ExValue::Edges(ex),
            witness_count: 1,
            tool_version: "test".into(),
        }
    }

    #[test]
    fn roundtrip_and_conflict() {
        let dir = tempfile::tempdir().unwrap();
        let store = JsonlStore::new(dir.path().join("cache.jsonl"));
        assert_eq!(store.get_entry(3, "Bw").unwrap(), None);
        store.put_entry(&entry(3, "Bw", 2)).unwrap();
        assert_eq!(store.get_entry(3, "Bw").unwrap(), Some(entry(3, "Bw", 2)));
        store.put_entry(&entry(3, "Bw", 2)).unwrap();
        let err = store.put_entry(&entry(3, "Bw", 3)).unwrap_err();
        assert!(matches!(err, Error::Cache(_)));
        let lines = std::fs::read_to_string(store.path()).unwrap();
        assert_eq!(lines.lines().count(), 1);
    }

    #[test]
    fn corrupt_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let good = serde_json::to_string(&entry(4, "Bw", 4)).unwrap();
        std::fs::write(&path, format!("{{not json\n{good}\n")).unwrap();
        let store = JsonlStore::new(&path);
        assert_eq!(store.get(4, "Bw").unwrap(), Some(ExValue::Edges(4)));
        assert_eq!(store.get(5, "Bw").unwrap(), None);
    }

    #[test]
    fn infeasible_entries() {
        let dir = tempfile::tempdir().unwrap();
        let store = JsonlStore::new(dir.path().join("c.jsonl"));
        store.put(4, "B?", ExValue::Infeasible, 0).unwrap();
        assert_eq!(store.get(4, "B?").unwrap(), Some(ExValue::Infeasible));
    }
}
