//! Line-oriented configuration files.
//!
//! ```text
//! # comment
//! [channel.params]
//! ple.UMi.LoS.6.75 = 1.79
//!
//! [link]
//! tx_power_dbm = 43   # trailing comments are allowed
//! ```
//!
//! Section headers may repeat; their entries are merged. A key may appear only
//! once per section. Frequencies are written in GHz, bandwidths in MHz and
//! losses in dB unless the key name carries another unit.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub fn parse<T: FromStr>(&self) -> Result<T> {
        self.value.parse().map_err(|_| Error::Parse {
            line: self.line,
            msg: format!("cannot parse `{}` for key `{}`", self.value, self.key),
        })
    }

    pub fn f64(&self) -> Result<f64> {
        let v: f64 = self.parse()?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.error("value must be finite"))
        }
    }

    /// Comma-separated list of numbers.
    pub fn f64_list(&self) -> Result<Vec<f64>> {
        self.list()
            .map(|item| {
                item.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.error(format!("cannot parse list item `{item}`")))
            })
            .collect()
    }

    pub fn list(&self) -> impl Iterator<Item = &str> {
        self.value.split(',').map(str::trim).filter(|s| !s.is_empty())
    }

    pub fn error(&self, msg: impl fmt::Display) -> Error {
        Error::Parse {
            line: self.line,
            msg: format!("key `{}`: {msg}", self.key),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(Entry::f64).transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key).map(Entry::parse).transpose()
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }

    /// Fails on the first key not in `allowed`.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
            Some(e) => Err(Error::Parse {
                line: e.line,
                msg: format!("unknown key `{}` in [{}]", e.key, self.name),
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    sections: Vec<Section>,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Appends an entry, creating the section if needed.
    pub fn push(&mut self, section: &str, key: impl Into<String>, value: impl Into<String>) -> Result<()> {
        let key = key.into();
        let idx = self.section_index(section);
        let sec = &mut self.sections[idx];
        if sec.get(&key).is_some() {
            return Err(Error::DuplicateKey { key, line: 0 });
        }
        sec.entries.push(Entry {
            key,
            value: value.into(),
            line: 0,
        });
        Ok(())
    }

    /// Sets an entry, replacing any previous value.
    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        let idx = self.section_index(section);
        let sec = &mut self.sections[idx];
        let value = value.into();
        match sec.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value,
            None => sec.entries.push(Entry {
                key: key.to_string(),
                value,
                line: 0,
            }),
        }
    }

    fn section_index(&mut self, name: &str) -> usize {
        match self.sections.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                self.sections.push(Section {
                    name: name.to_string(),
                    entries: Vec::new(),
                });
                self.sections.len() - 1
            }
        }
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn valid_section_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .split('.')
            .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut config = Config::default();
        let mut current: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').map(str::trim).ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: format!("unterminated section header `{line}`"),
                })?;
                if !valid_section_name(name) {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("invalid section name `{name}`"),
                    });
                }
                current = Some(config.section_index(name));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected `key = value`, found `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "empty key".into(),
                });
            }
            let sec_idx = current.ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("entry `{key}` appears before any [section] header"),
            })?;
            let sec = &mut config.sections[sec_idx];
            if sec.get(key).is_some() {
                return Err(Error::DuplicateKey {
                    key: format!("{}.{key}", sec.name),
                    line: line_no,
                });
            }
            sec.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line: line_no,
            });
        }
        Ok(config)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, sec) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "[{}]", sec.name)?;
            for e in &sec.entries {
                writeln!(f, "{} = {}", e.key, e.value)?;
            }
        }
        Ok(())
    }
}
