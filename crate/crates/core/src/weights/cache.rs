//! Moment tables keyed by (α, β, μ, t, bits, N), in memory and optionally on disk.
//!
//! Disk documents are JSON with every number as a full-precision decimal
//! string, so a table read back is bit-identical to the one written.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use rug::Float;
use serde::{Deserialize, Serialize};

use super::{moment_table, MomentTable, WeightParams};
use crate::error::{Error, Result};
use crate::numerics::{to_decimal, Jet2, PrecisionContext};

pub const CACHE_FORMAT: &str = "lhpvi-moments";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MomentDoc {
    pub format: String,
    pub version: u32,
    pub alpha: String,
    pub beta: String,
    pub mu: String,
    pub t: String,
    pub bits: u32,
    pub n: usize,
    pub moments: Vec<MomentEntry>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct MomentEntry {
    pub k: usize,
    pub v: String,
    pub d1: String,
    pub d2: String,
}

impl MomentDoc {
    pub fn from_table(tab: &MomentTable, bits: u32) -> Self {
        let p = &tab.params;
        Self {
            format: CACHE_FORMAT.into(),
            version: CACHE_VERSION,
            alpha: to_decimal(&p.alpha),
            beta: to_decimal(&p.beta),
            mu: to_decimal(&p.mu),
            t: to_decimal(&p.t),
            bits,
            n: tab.n(),
            moments: tab
                .w
                .iter()
                .enumerate()
                .map(|(k, j)| MomentEntry {
                    k,
                    v: to_decimal(&j.v),
                    d1: to_decimal(&j.d1),
                    d2: to_decimal(&j.d2),
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> Result<MomentTable> {
        if self.format != CACHE_FORMAT || self.version != CACHE_VERSION {
            return Err(Error::Cache(format!(
                "unsupported document {} v{}",
                self.format, self.version
            )));
        }
        let ctx = PrecisionContext::new(self.bits)?;
        let params = WeightParams::parse(&ctx, &self.alpha, &self.beta, &self.mu, &self.t)?;
        let num = |s: &str| -> Result<Float> { ctx.parse(s) };
        let w = self
            .moments
            .iter()
            .map(|e| Ok(Jet2::new(num(&e.v)?, num(&e.d1)?, num(&e.d2)?)))
            .collect::<Result<Vec<_>>>()?;
        if w.len() != self.n + 1 {
            return Err(Error::Cache("moment count does not match n".into()));
        }
        Ok(MomentTable::from_jets(params, w))
    }
}

/// Concurrent readers, exclusive writers.
#[derive(Debug, Default)]
pub struct MomentCache {
    dir: Option<PathBuf>,
    mem: RwLock<HashMap<String, MomentTable>>,
}

impl MomentCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: Some(dir.into()),
            mem: RwLock::new(HashMap::new()),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn key(params: &WeightParams, n: usize, bits: u32) -> String {
        format!("{};bits={bits};n={n}", params.key())
    }

    /// File name derived from a stable hash of the key.
    pub fn file_for(&self, params: &WeightParams, n: usize, bits: u32) -> Option<PathBuf> {
        let key = Self::key(params, n, bits);
        // FNV-1a, stable across runs and platforms
        let mut h: u64 = 0xcbf29ce484222325;
        for b in key.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        self.dir
            .as_ref()
            .map(|d| d.join(format!("moments-{h:016x}-b{bits}-n{n}.json")))
    }

    /// Returns the table and whether it was served from the cache.
    pub fn get_or_compute(
        &self,
        params: &WeightParams,
        n: usize,
        ctx: &PrecisionContext,
    ) -> Result<(MomentTable, bool)> {
        let key = Self::key(params, n, ctx.bits());
        if let Some(t) = self.mem.read().unwrap().get(&key) {
            return Ok((t.clone(), true));
        }
        if let Some(path) = self.file_for(params, n, ctx.bits()) {
            if path.exists() {
                let text = fs::read_to_string(&path)
                    .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
                let doc: MomentDoc = serde_json::from_str(&text)
                    .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
                let tab = doc.to_table()?;
                if tab.params.key() == params.key() {
                    self.mem.write().unwrap().insert(key, tab.clone());
                    return Ok((tab, true));
                }
            }
        }
        let tab = moment_table(params, n, ctx)?;
        if let Some(path) = self.file_for(params, n, ctx.bits()) {
            let doc = MomentDoc::from_table(&tab, ctx.bits());
            let text = serde_json::to_string_pretty(&doc)
                .map_err(|e| Error::Cache(e.to_string()))?;
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent).map_err(|e| Error::Cache(format!("{}: {e}", parent.display())))?;
            }
            fs::write(&path, text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        }
        self.mem.write().unwrap().insert(key, tab.clone());
        Ok((tab, false))
    }
}
