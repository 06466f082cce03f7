//! `key=value` run configuration files. Keys mirror the CLI flags without
//! the leading dashes; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::HarnessError;

pub const KEYS: &[&str] = &[
    "game",
    "engine-a",
    "engine-b",
    "engines",
    "matches",
    "budget-nodes",
    "budget-ms",
    "seed",
    "out",
    "runs",
    "states",
    "games",
    "c",
    "lambda",
    "depth",
    "trials",
    "tolerance",
    "table",
    "log-moves",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", n + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        if !KEYS.contains(&key) {
            return Err(HarnessError::Config(format!("unknown key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError> {
        self.get_str(key)
            .map(|v| v.parse().map_err(|_| HarnessError::Config(format!("bad value for '{key}': '{v}'"))))
            .transpose()
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, HarnessError> {
        self.get_list_sep(key, ',')
    }

    /// List split on `sep`; engine lists use `;` since specs contain commas.
    pub fn get_list_sep<T: FromStr>(&self, key: &str, sep: char) -> Result<Option<Vec<T>>, HarnessError> {
        self.get_str(key)
            .map(|v| {
                v.split(sep)
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| HarnessError::Config(format!("bad item in '{key}': '{s}'"))))
                    .collect()
            })
            .transpose()
    }

    /// Entries of `other` win.
    pub fn merged(&self, other: &RunConfig) -> RunConfig {
        let mut values = self.values.clone();
        values.extend(other.values.clone());
        RunConfig { values }
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let cfg = RunConfig::parse("# run\ngame = pig\nmatches=10 # ten\n\nbudget-nodes=500\n").unwrap();
        assert_eq!(cfg.get_str("game"), Some("pig"));
        assert_eq!(cfg.get::<usize>("matches").unwrap(), Some(10));
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(RunConfig::parse("colour=blue").is_err());
        assert!(RunConfig::parse("game pig").is_err());
        assert!(RunConfig::parse("matches=x").unwrap().get::<usize>("matches").is_err());
    }

    #[test]
    fn later_config_wins() {
        let a = RunConfig::parse("seed=1\ngame=pig").unwrap();
        let b = RunConfig::parse("seed=2").unwrap();
        let m = a.merged(&b);
        assert_eq!(m.get::<u64>("seed").unwrap(), Some(2));
        assert_eq!(m.get_str("game"), Some("pig"));
    }
}
