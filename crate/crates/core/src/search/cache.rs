//! Append-only JSON-lines result cache keyed by `(n, property, method)`.
//!
//! Each entry is written with a single `write_all` on a file opened in
//! append mode, so concurrent writers never interleave partial rows.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Environment variable naming the default cache file.
pub const CACHE_ENV: &str = "CHAINLATTICE_CACHE";
const DEFAULT_PATH: &str = ".chainlattice/cache.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub n: usize,
    pub property: String,
    pub method: String,
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub value: serde_json::Value,
}

impl CacheEntry {
    pub fn new(n: usize, property: impl Into<String>, method: impl Into<String>, value: serde_json::Value) -> CacheEntry {
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        CacheEntry { n, property: property.into(), method: method.into(), created, value }
    }

    fn matches(&self, n: usize, property: &str, method: &str) -> bool {
        self.n == n && self.property == property && self.method == method
    }
}

#[derive(Clone, Debug)]
pub struct ResultCache {
    path: PathBuf,
}

impl ResultCache {
    pub fn open(path: impl Into<PathBuf>) -> ResultCache {
        ResultCache { path: path.into() }
    }

    /// `$CHAINLATTICE_CACHE`, else `.chainlattice/cache.jsonl`.
    pub fn from_env() -> ResultCache {
        let path = std::env::var_os(CACHE_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_PATH));
        ResultCache::open(path)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// All readable entries in file order; malformed lines are skipped.
    pub fn entries(&self) -> Result<Vec<CacheEntry>, Error> {
        let text = match fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", self.path.display()))),
        };
        Ok(text.lines().filter_map(|l| serde_json::from_str(l).ok()).collect())
    }

    /// Latest entry for the key.
    pub fn get(&self, n: usize, property: &str, method: &str) -> Result<Option<CacheEntry>, Error> {
        Ok(self.entries()?.into_iter().rev().find(|e| e.matches(n, property, method)))
    }

    /// Appends `entry` unless its key is already present. With `force` the
    /// entry is always appended and shadows older ones. Returns whether a
    /// row was written.
    pub fn put(&self, entry: &CacheEntry, force: bool) -> Result<bool, Error> {
        if !force && self.get(entry.n, &entry.property, &entry.method)?.is_some() {
            return Ok(false);
        }
        let err = |e: std::io::Error| Error::Cache(format!("{}: {e}", self.path.display()));
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(err)?;
        }
        let mut line = serde_json::to_string(entry).map_err(|e| Error::Cache(e.to_string()))?;
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path).map_err(err)?;
        file.write_all(line.as_bytes()).map_err(err)?;
        Ok(true)
    }

    /// Latest entry per key as CSV: `n,property,method,created,value`.
    pub fn export_csv(&self) -> Result<String, Error> {
        let mut latest: Vec<CacheEntry> = Vec::new();
        for e in self.entries()? {
            match latest.iter_mut().find(|x| x.matches(e.n, &e.property, &e.method)) {
                Some(slot) => *slot = e,
                None => latest.push(e),
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| Error::Cache(e.to_string());
        w.write_record(["n", "property", "method", "created", "value"]).map_err(fail)?;
        for e in &latest {
            let record = [e.n.to_string(), e.property.clone(), e.method.clone(), e.created.to_string(), e.value.to_string()];
            w.write_record(&record).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Cache(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8 csv"))
    }
}
