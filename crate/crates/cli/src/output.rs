//! Run metadata and output plumbing shared by the subcommands.

use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hexshuffle::{Error, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SEED_ENV: &str = "HEXSHUFFLE_SEED";

/// `HEXSHUFFLE_SEED` when set, else `--seed`, else fresh entropy.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag.unwrap_or_else(|| RandomState::new().build_hasher().finish())),
    }
}

/// Seed for commands that use no randomness: echoed only when given.
pub fn optional_seed(flag: Option<u64>) -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(_) => resolve_seed(flag).map(Some),
        Err(_) => Ok(flag),
    }
}

/// Hex SHA-256 of the canonical JSON form of `config`.
pub fn config_hash(config: &Value) -> String {
    let digest = Sha256::digest(config.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Report {
    started: Instant,
    timing: bool,
    out: Option<PathBuf>,
    meta: Map<String, Value>,
    config: Value,
    body: Map<String, Value>,
}

impl Report {
    pub fn new(config: Value, seed: Option<u64>, timing: bool, out: Option<PathBuf>) -> Self {
        let mut meta = Map::new();
        meta.insert("tool_version".into(), env!("CARGO_PKG_VERSION").into());
        meta.insert("seed".into(), seed.map_or(Value::Null, Value::from));
        meta.insert("config_hash".into(), config_hash(&config).into());
        Report {
            started: Instant::now(),
            timing,
            out,
            meta,
            config,
            body: Map::new(),
        }
    }

    pub fn insert(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Inconsistent(e.to_string()))?;
        self.body.insert(key.into(), v);
        Ok(())
    }

    /// Writes the JSON document; wall time goes to stderr unless `--timing`.
    pub fn finish(mut self) -> Result<()> {
        let secs = self.started.elapsed().as_secs_f64();
        if self.timing {
            self.meta.insert("wall_time".into(), secs.into());
        }
        eprintln!("wall_time: {secs:.3}s");
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(self.meta));
        doc.insert("config".into(), self.config);
        doc.extend(self.body);
        let mut text = serde_json::to_string(&Value::Object(doc)).map_err(|e| Error::Inconsistent(e.to_string()))?;
        text.push('\n');
        write_text(self.out.as_deref(), &text)
    }
}

/// Writes to `path`, or stdout when absent.
pub fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io(e.to_string()))
        }
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::Read::read_to_string(&mut io::stdin(), &mut s).map_err(|e| Error::Io(e.to_string()))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}
