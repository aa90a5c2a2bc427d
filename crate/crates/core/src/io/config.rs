use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub value: String,
    pub line: usize,
}

/// Flat `key = value` file with `[section]` headers. Keys before the first
/// header live in the unnamed section `""`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, ConfigEntry>>,
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|ch| ch.is_ascii_alphanumeric() || matches!(ch, '_' | '-' | '.'))
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::default();
    let mut section = String::new();
    cfg.sections.insert(section.clone(), BTreeMap::new());
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(line, "section header is missing ']'"))?
                .trim();
            if !is_ident(name) {
                return Err(Error::parse(line, format!("invalid section name {name:?}")));
            }
            if cfg.sections.contains_key(name) {
                return Err(Error::parse(line, format!("section [{name}] appears twice")));
            }
            section = name.to_string();
            cfg.sections.insert(section.clone(), BTreeMap::new());
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(line, "expected `key = value` or `[section]`"))?;
        let (key, value) = (key.trim(), value.trim());
        if !is_ident(key) {
            return Err(Error::parse(line, format!("invalid key {key:?}")));
        }
        if value.is_empty() {
            return Err(Error::parse(line, format!("key {key:?} has no value")));
        }
        let entries = cfg.sections.get_mut(&section).expect("current section exists");
        if entries.contains_key(key) {
            return Err(Error::parse(line, format!("key {key:?} repeated in section [{section}]")));
        }
        entries.insert(key.to_string(), ConfigEntry { value: value.to_string(), line });
    }
    Ok(cfg)
}

impl ConfigFile {
    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&ConfigEntry> {
        self.sections.get(section)?.get(key)
    }

    /// Typed value; errors carry the line of the offending entry.
    pub fn value<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(e.line, format!("cannot parse {key} = {:?}", e.value))),
        }
    }

    pub fn value_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        Ok(self.value(section, key)?.unwrap_or(default))
    }

    /// Comma-separated list of typed values.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        let Some(e) = self.get(section, key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse()
                    .map_err(|_| Error::parse(e.line, format!("cannot parse {item:?} in {key}")))
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    /// Rejects keys in `section` that are not in `allowed`.
    pub fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<()> {
        if let Some(entries) = self.sections.get(section) {
            for (key, e) in entries {
                if !allowed.contains(&key.as_str()) {
                    return Err(Error::parse(e.line, format!("unknown key {key:?} in section [{section}]")));
                }
            }
        }
        Ok(())
    }

    /// Rejects sections not in `allowed`; the unnamed section is always allowed.
    pub fn check_sections(&self, allowed: &[&str]) -> Result<()> {
        for name in self.sections.keys() {
            if !name.is_empty() && !allowed.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown section [{name}]")));
            }
        }
        Ok(())
    }
}
