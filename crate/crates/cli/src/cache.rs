//! On-disk ζ cache: one JSON record per line in `zeta.jsonl`, appended after
//! each run. Unreadable lines are skipped; a missing or unwritable directory
//! just means no caching.

use std::collections::HashSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Value};
use zetahopf_core::numerics::{NumericResult, ZetaCache};
use zetahopf_core::words::Composition;

const FILE: &str = "zeta.jsonl";

pub struct DiskCache {
    path: Option<PathBuf>,
    known: HashSet<(String, u32)>,
}

fn cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("MZV_CACHE_DIR") {
        return Some(PathBuf::from(d));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("zetahopf"))
}

fn parse_line(line: &str) -> Option<(Composition, u32, NumericResult)> {
    let v: Value = serde_json::from_str(line).ok()?;
    let c: Composition = v.get("composition")?.as_str()?.parse().ok()?;
    let digits = u32::try_from(v.get("digits")?.as_u64()?).ok()?;
    let r = NumericResult::from_record(v.get("result")?)?;
    Some((c, digits, r))
}

impl DiskCache {
    /// Load every readable record into `cache`.
    pub fn load(cache: &ZetaCache) -> DiskCache {
        let path = cache_dir().map(|d| d.join(FILE));
        let mut known = HashSet::new();
        if let Some(text) = path.as_ref().and_then(|p| fs::read_to_string(p).ok()) {
            for (c, digits, r) in text.lines().filter_map(parse_line) {
                known.insert((c.to_string(), digits));
                cache.insert(c, digits, r);
            }
        }
        DiskCache { path, known }
    }

    /// Append the entries computed during this run.
    pub fn store(&self, cache: &ZetaCache) {
        let Some(path) = &self.path else { return };
        let mut out = String::new();
        for (c, digits, r) in cache.entries() {
            if !self.known.contains(&(c.to_string(), digits)) {
                let rec = json!({"composition": c.to_string(), "digits": digits, "result": r.to_record()});
                out.push_str(&rec.to_string());
                out.push('\n');
            }
        }
        if out.is_empty() {
            return;
        }
        if let Some(dir) = path.parent() {
            if fs::create_dir_all(dir).is_err() {
                return;
            }
        }
        if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(path) {
            let _ = f.write_all(out.as_bytes());
        }
    }
}
