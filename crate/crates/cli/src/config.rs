//! `key=value` config files. Flags given on the command line win.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "beta-override",
    "cap",
    "delta",
    "dump",
    "event",
    "gamma",
    "m",
    "max-rejections",
    "method",
    "multiplier",
    "n",
    "N",
    "only",
    "out",
    "output",
    "p",
    "r",
    "seed",
    "threshold",
    "tolerance",
    "trials",
    "two-sided",
];

/// Parameter source: the config file, overridden by flags. Every value that
/// is resolved is echoed into the run manifest.
#[derive(Debug, Default)]
pub struct Params {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            bail!("config line {}: unknown key {key:?}", lineno + 1);
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

impl Params {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Params {
            file,
            resolved: BTreeMap::new(),
        })
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(text) => Some(
                    text.parse::<T>()
                        .map_err(|e| anyhow!("invalid parameter {key}: {text:?}: {e}"))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.resolved.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        self.get(key, flag)?
            .ok_or_else(|| anyhow!("missing parameter {key}: pass --{key} or set it in the config file"))
    }

    pub fn or<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        match self.get(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    /// A boolean switch: set by the flag or by `key=true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let on = if flag { true } else { self.get::<bool>(key, None)?.unwrap_or(false) };
        if on {
            self.resolved.insert(key.to_string(), "true".into());
        }
        Ok(on)
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let map = parse_config("# sweep\n\nn = 40\ntrials=100\n").unwrap();
        assert_eq!(map["n"], "40");
        assert_eq!(map["trials"], "100");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(parse_config("bogus=1").is_err());
        assert!(parse_config("n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut p = Params {
            file: parse_config("n=40\nseed=3").unwrap(),
            resolved: BTreeMap::new(),
        };
        assert_eq!(p.require::<u64>("n", Some(8)).unwrap(), 8);
        assert_eq!(p.require::<u64>("seed", None).unwrap(), 3);
        assert!(p.require::<u64>("trials", None).is_err());
        assert_eq!(p.resolved()["n"], "8");
    }

    #[test]
    fn bad_values_name_the_key() {
        let mut p = Params {
            file: parse_config("n=forty").unwrap(),
            resolved: BTreeMap::new(),
        };
        let err = p.require::<u64>("n", None).unwrap_err().to_string();
        assert!(err.contains("invalid parameter n"), "{err}");
    }
}
