//! Flat `key = value` configuration.
//!
//! Blank lines and `#` comments are ignored. Keys are lower-case
//! identifiers; repeating a key or using one the command does not know is an
//! error. Lists are comma-separated, lists of parameter points are
//! `;`-separated, and reals accept `p/q` fractions.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: String,
    line: usize,
}

/// Raw settings from a config file and command-line overrides, with typed
/// accessors that record every value they resolve (defaults included).
#[derive(Debug, Clone, Default)]
pub struct Settings {
    entries: BTreeMap<String, Entry>,
    resolved: BTreeMap<String, String>,
}

fn is_key(k: &str) -> bool {
    !k.is_empty()
        && k.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl Settings {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut s = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| CliError::Config {
                path: origin.to_string(),
                line,
                message,
            };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, found {body:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if !is_key(k) {
                return Err(err(format!("invalid key {k:?}")));
            }
            if s.entries.contains_key(k) {
                return Err(err(format!("duplicate key `{k}`")));
            }
            s.entries.insert(
                k.to_string(),
                Entry {
                    value: v.to_string(),
                    origin: origin.to_string(),
                    line,
                },
            );
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Settings::parse(&text, &path.display().to_string())
    }

    /// Set or replace a key from the command line.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> CliResult<()> {
        if !is_key(key) {
            return Err(CliError::validation(format!("invalid key {key:?}")));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.into(),
                origin: "command line".to_string(),
                line: 0,
            },
        );
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> CliResult<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| {
            CliError::validation(format!("--set expects key=value, got {pair:?}"))
        })?;
        self.set(k.trim(), v.trim())
    }

    /// Reject keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> CliResult<()> {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for (k, e) in &self.entries {
            if !allowed.contains(k.as_str()) {
                let message = format!("unknown key `{k}`");
                return Err(if e.line == 0 {
                    CliError::validation(message)
                } else {
                    CliError::Config {
                        path: e.origin.clone(),
                        line: e.line,
                        message,
                    }
                });
            }
        }
        Ok(())
    }

    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn fail(&self, key: &str, message: String) -> CliError {
        match self.entries.get(key) {
            Some(e) if e.line > 0 => CliError::Config {
                path: e.origin.clone(),
                line: e.line,
                message: format!("`{key}`: {message}"),
            },
            _ => CliError::validation(format!("`{key}`: {message}")),
        }
    }

    fn typed<T>(
        &mut self,
        key: &str,
        default: Option<&str>,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> CliResult<Option<T>> {
        let raw = match (self.entries.get(key), default) {
            (Some(e), _) => e.value.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Ok(None),
        };
        let v = parse(&raw).map_err(|m| self.fail(key, m))?;
        self.resolved.insert(key.to_string(), raw);
        Ok(Some(v))
    }

    fn required<T>(
        &mut self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> CliResult<T> {
        self.typed(key, None, parse)?
            .ok_or_else(|| CliError::validation(format!("missing required key `{key}`")))
    }

    pub fn string(&mut self, key: &str, default: Option<&str>) -> CliResult<Option<String>> {
        self.typed(key, default, |s| Ok(s.to_string()))
    }

    pub fn choice(&mut self, key: &str, default: &str, options: &[&str]) -> CliResult<String> {
        let v = self.typed(key, Some(default), |s| {
            if options.contains(&s) {
                Ok(s.to_string())
            } else {
                Err(format!("expected one of {}, got {s:?}", options.join(", ")))
            }
        })?;
        Ok(v.expect("default given"))
    }

    pub fn real(&mut self, key: &str, default: Option<&str>) -> CliResult<Option<f64>> {
        self.typed(key, default, parse_real)
    }

    pub fn required_real(&mut self, key: &str) -> CliResult<f64> {
        self.required(key, parse_real)
    }

    pub fn uint(&mut self, key: &str, default: Option<&str>) -> CliResult<Option<u64>> {
        self.typed(key, default, parse_uint)
    }

    pub fn required_uint(&mut self, key: &str) -> CliResult<u64> {
        self.required(key, parse_uint)
    }

    pub fn boolean(&mut self, key: &str, default: bool) -> CliResult<bool> {
        let d = if default { "true" } else { "false" };
        let v = self.typed(key, Some(d), |s| match s {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(format!("expected true or false, got {other:?}")),
        })?;
        Ok(v.expect("default given"))
    }

    pub fn reals(&mut self, key: &str) -> CliResult<Option<Vec<f64>>> {
        self.typed(key, None, |s| parse_list(s, parse_real))
    }

    pub fn required_reals(&mut self, key: &str) -> CliResult<Vec<f64>> {
        self.required(key, |s| parse_list(s, parse_real))
    }

    pub fn uints(&mut self, key: &str) -> CliResult<Option<Vec<u64>>> {
        self.typed(key, None, |s| parse_list(s, parse_uint))
    }

    pub fn required_uints(&mut self, key: &str) -> CliResult<Vec<u64>> {
        self.required(key, |s| parse_list(s, parse_uint))
    }

    /// `;`-separated list of comma-separated real vectors.
    pub fn points(&mut self, key: &str) -> CliResult<Option<Vec<Vec<f64>>>> {
        self.typed(key, None, |s| {
            s.split(';')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| parse_list(p, parse_real))
                .collect()
        })
    }

    /// Every resolved key with its textual value, defaults included.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }

    pub fn record(&mut self, key: &str, value: impl Into<String>) {
        self.resolved.insert(key.to_string(), value.into());
    }
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num
                .trim()
                .parse()
                .map_err(|_| format!("{s:?} is not a number"))?;
            let d: f64 = den
                .trim()
                .parse()
                .map_err(|_| format!("{s:?} is not a number"))?;
            n / d
        }
        None => s.parse().map_err(|_| format!("{s:?} is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

pub fn parse_uint(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    // Allow exact scientific forms like 1e6.
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("{s:?} is not a non-negative integer")),
    }
}

pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| item(p.trim())).collect()
}
