//! Flat `key = value` configuration files.
//!
//! `#` starts a comment. Lists are comma separated and may contain inclusive
//! ranges: `1..10, 20`.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parsed key-value pairs. Consumers take the keys they know; leftovers are rejected.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", i + 1)))?;
            let k = k.trim().to_ascii_lowercase();
            if k.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", i + 1)));
            }
            if entries
                .insert(k.clone(), (i + 1, v.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse(format!("line {}: duplicate key `{k}`", i + 1)));
            }
        }
        Ok(KeyValues { entries })
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    pub fn take<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.entries.remove(key) {
            None => Ok(default),
            Some((line, v)) => v
                .parse()
                .map_err(|_| Error::Parse(format!("line {line}: bad value `{v}` for `{key}`"))),
        }
    }

    pub fn take_list<T>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: FromStr + Clone + TryFrom<usize>,
    {
        match self.entries.remove(key) {
            None => Ok(default.to_vec()),
            Some((line, v)) => {
                parse_list(&v).map_err(|e| Error::Parse(format!("line {line}: `{key}`: {e}")))
            }
        }
    }

    pub fn take_f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.entries.remove(key) {
            None => Ok(default.to_vec()),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| {
                    Error::Parse(format!("line {line}: bad number list `{v}` for `{key}`"))
                }),
        }
    }

    /// Errors if any key was not consumed.
    pub fn finish(self) -> Result<()> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(Error::Parse(format!("line {line}: unknown key `{k}`"))),
        }
    }
}

/// `"2,3,4"`, `"1..10"`, `"1..3, 7"`; ranges are inclusive.
pub fn parse_list<T: FromStr + TryFrom<usize>>(s: &str) -> std::result::Result<Vec<T>, String> {
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| format!("bad range `{part}`"))?;
            let b: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| format!("bad range `{part}`"))?;
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            for x in a..=b {
                out.push(T::try_from(x).map_err(|_| format!("bad value in `{part}`"))?);
            }
        } else {
            out.push(part.parse().map_err(|_| format!("bad value `{part}`"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}
