//! Flat `key = value` configuration merged with command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exponents::ExponentPoint;

/// Keys accepted by every command besides its own.
pub const COMMON_KEYS: [&str; 3] = ["out", "seed", "plot"];

/// Default seed when none is configured.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", k + 1)))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", k + 1)));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", k + 1)));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// A command with its merged, validated parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// `tol.<name> = value` entries.
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    /// Overlays `flags` on `file`, rejecting keys outside `allowed`,
    /// [`COMMON_KEYS`] and `tol.*`.
    pub fn assemble(
        command: &str,
        allowed: &[&str],
        file: BTreeMap<String, String>,
        flags: Vec<(&str, Option<String>)>,
    ) -> Result<Self> {
        let mut merged = file;
        for (k, v) in flags {
            if let Some(v) = v {
                merged.insert(k.to_string(), v);
            }
        }
        let mut params = BTreeMap::new();
        let mut tolerances = BTreeMap::new();
        let mut out = None;
        let mut seed = DEFAULT_SEED;
        for (k, v) in merged {
            if let Some(name) = k.strip_prefix("tol.") {
                tolerances.insert(name.to_string(), parse_value::<f64>(&k, &v)?);
            } else if k == "out" {
                out = Some(PathBuf::from(v));
            } else if k == "seed" {
                seed = parse_value(&k, &v)?;
            } else if allowed.contains(&k.as_str()) || COMMON_KEYS.contains(&k.as_str()) {
                params.insert(k, v);
            } else {
                return Err(Error::Config(format!("unknown key `{k}` for command {command}")));
            }
        }
        Ok(Self { command: command.to_string(), params, out, seed, tolerances })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.params.get(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::Config(format!("missing required key `{key}`")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.params
            .get(key)
            .map(|v| v.split(',').map(|s| parse_value(key, s.trim())).collect())
            .transpose()
    }

    /// `x,y` exponent point.
    pub fn point(&self, key: &str) -> Result<ExponentPoint> {
        let v: Vec<f64> = self.list(key)?.ok_or_else(|| Error::Config(format!("missing required key `{key}`")))?;
        if v.len() != 2 {
            return Err(Error::Config(format!("`{key}` must be x,y")));
        }
        ExponentPoint::new(v[0], v[1]).map_err(|e| Error::Config(format!("`{key}`: {e}")))
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        self.get_or(key, false)
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("cannot parse `{key}` = `{v}`")))
}
