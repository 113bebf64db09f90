//! Flat `key = value` settings merged from a config file and command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use lpkit::weights::ScaleRange;
use lpkit::{Error, Result};

pub fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_error(&format!("line {}", i + 1), format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(config_error(&format!("line {}", i + 1), "empty key"));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Fails on the first key outside `allowed`.
    pub fn restrict(&self, suite: &str, allowed: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(config_error(k, format!("not a setting of the `{suite}` suite (known: {})", allowed.join(", ")))),
            None => Ok(()),
        }
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| config_error(key, format!("cannot parse `{v}`"))),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.get(key, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(config_error(key, format!("must be positive and finite, got {v}")));
        }
        Ok(v)
    }

    pub fn list<T: FromStr>(&self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: Clone,
    {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| config_error(key, format!("cannot parse `{s}` in `{v}`"))))
                .collect(),
        }
    }

    /// `lo:hi` scale window.
    pub fn window(&self, key: &str) -> Result<Option<ScaleRange>> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let (lo, hi) = v.split_once(':').ok_or_else(|| config_error(key, format!("expected `lo:hi`, got `{v}`")))?;
        let parse = |s: &str| s.trim().parse::<i32>().map_err(|_| config_error(key, format!("cannot parse `{s}`")));
        let range = ScaleRange::new(parse(lo)?, parse(hi)?).map_err(|e| config_error(key, e.to_string()))?;
        Ok(Some(range))
    }
}
