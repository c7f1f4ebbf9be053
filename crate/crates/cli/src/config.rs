//! Line-oriented `key = value` configuration with dotted sections.
//!
//! The format is deliberately trivial: one assignment per line, `#` comments,
//! no quoting. Keys are consumed by the command handlers; leftovers are
//! reported as config errors so typos never pass silently.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use crate::error::CliError;

pub struct Config {
    values: BTreeMap<String, String>,
    used: Mutex<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Config(format!("line {}: empty key", lineno + 1)));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key '{key}'",
                    lineno + 1
                )));
            }
        }
        Ok(Config {
            values,
            used: Mutex::new(BTreeSet::new()),
        })
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.used.lock().unwrap().insert(key.to_string());
        self.values.get(key).cloned()
    }

    pub fn require(&self, key: &str) -> Result<String, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Config(format!("missing key '{key}'")))
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("key '{key}': expected a real, got '{v}'")))
            })
            .transpose()
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, CliError> {
        self.get_f64(key)?
            .ok_or_else(|| CliError::Config(format!("missing key '{key}'")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.get_f64(key)?.unwrap_or(default))
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|_| {
                        CliError::Config(format!("key '{key}': expected an integer, got '{v}'"))
                    })
            })
            .transpose()
    }

    pub fn require_u64(&self, key: &str) -> Result<u64, CliError> {
        self.get_u64(key)?
            .ok_or_else(|| CliError::Config(format!("missing key '{key}'")))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        Ok(self.get_u64(key)?.unwrap_or(default))
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(CliError::Config(format!(
                    "key '{key}': expected true/false, got '{v}'"
                ))),
            },
        }
    }

    /// Comma-separated reals.
    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            CliError::Config(format!("key '{key}': bad real '{}'", s.trim()))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// Comma-separated integers.
    pub fn u32_list(&self, key: &str) -> Result<Option<Vec<u32>>, CliError> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim().parse::<u32>().map_err(|_| {
                            CliError::Config(format!("key '{key}': bad integer '{}'", s.trim()))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    /// Every key must have been consulted by the handler.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.lock().unwrap();
        for key in self.values.keys() {
            if !used.contains(key) {
                return Err(CliError::Config(format!("unknown key '{key}'")));
            }
        }
        Ok(())
    }

    /// Canonical text used for the manifest hash: sorted `key=value` lines.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_tracks_usage() {
        let cfg = Config::parse("a = 1\n# comment\nprocess.kind = sine_cosine\n").unwrap();
        assert_eq!(cfg.require_u64("a").unwrap(), 1);
        assert!(cfg.finish().is_err()); // process.kind unused
        assert_eq!(cfg.require("process.kind").unwrap(), "sine_cosine");
        assert!(cfg.finish().is_ok());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("just a line\n").is_err());
        assert!(Config::parse("a = 1\na = 2\n").is_err());
    }

    #[test]
    fn canonical_text_is_sorted() {
        let cfg = Config::parse("b = 2\na = 1\n").unwrap();
        assert_eq!(cfg.canonical_text(), "a=1\nb=2\n");
    }
}
