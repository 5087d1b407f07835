//! Pattern identifiers, count profiles and the brute-force counting oracle.
//!
//! A pattern of order `k` is a permutation of `1..=k` in one-line notation,
//! identified by its Lehmer-code rank in `0..k!`. Rank 0 is the identity and
//! rank `k! - 1` the decreasing permutation, so ranks follow lexicographic order.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::math::{binomial, factorial};
use crate::series::RankSequence;

pub const MAX_PATTERN_ORDER: usize = 8;

/// Default cap on the number of tuples the oracle will enumerate.
pub const DEFAULT_ORACLE_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternId {
    order: u8,
    index: u32,
}

impl PatternId {
    pub fn new(order: usize, index: u64) -> Result<Self> {
        check_order(order, 1, MAX_PATTERN_ORDER)?;
        if index >= factorial(order) as u64 {
            return Err(Error::PatternOutOfRange { order, index });
        }
        Ok(PatternId {
            order: order as u8,
            index: index as u32,
        })
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    /// Standardizes a tuple of pairwise distinct values and returns its pattern.
    pub fn from_tuple<T: PartialOrd>(tuple: &[T]) -> Result<Self> {
        check_order(tuple.len(), 1, MAX_PATTERN_ORDER)?;
        for i in 0..tuple.len() {
            for j in i + 1..tuple.len() {
                if tuple[i] == tuple[j] || tuple[i].partial_cmp(&tuple[j]).is_none() {
                    return Err(Error::InvalidTuple);
                }
            }
        }
        Ok(PatternId {
            order: tuple.len() as u8,
            index: lehmer_rank(tuple) as u32,
        })
    }

    /// One-line notation, values `1..=k`.
    pub fn to_permutation(&self) -> Vec<u8> {
        lehmer_unrank(self.order as usize, self.index as usize)
    }

    pub fn from_permutation(perm: &[u8]) -> Result<Self> {
        let k = perm.len();
        check_order(k, 1, MAX_PATTERN_ORDER)?;
        let mut seen = [false; MAX_PATTERN_ORDER];
        for &p in perm {
            let p = p as usize;
            if p == 0 || p > k || seen[p - 1] {
                return Err(Error::InvalidTuple);
            }
            seen[p - 1] = true;
        }
        Self::from_tuple(perm)
    }

    /// Parses one-line notation such as `"3214"` or `"[3,2,1,4]"`.
    pub fn parse(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s
            .chars()
            .filter(|c| !matches!(c, '[' | ']' | ',' | ' '))
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("bad pattern {s:?}")))
            })
            .collect::<Result<_>>()?;
        Self::from_permutation(&digits)
    }

    pub fn reverse(&self) -> PatternId {
        let mut p = self.to_permutation();
        p.reverse();
        PatternId::from_tuple(&p).expect("permutation")
    }

    pub fn complement(&self) -> PatternId {
        let k = self.order + 1;
        let p: Vec<u8> = self.to_permutation().iter().map(|&v| k - v).collect();
        PatternId::from_tuple(&p).expect("permutation")
    }

    pub fn apply(&self, op: Symmetry) -> PatternId {
        match op {
            Symmetry::Reverse => self.reverse(),
            Symmetry::Complement => self.complement(),
        }
    }

    pub fn all(order: usize) -> impl Iterator<Item = PatternId> {
        (0..factorial(order) as u32).map(move |index| PatternId {
            order: order as u8,
            index,
        })
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.to_permutation() {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Reverse,
    Complement,
}

/// Lehmer rank of the pattern formed by `tuple`: digit `j` counts later entries below entry `j`.
pub(crate) fn lehmer_rank<T: PartialOrd>(tuple: &[T]) -> usize {
    let k = tuple.len();
    let mut rank = 0;
    for j in 0..k {
        let smaller = tuple[j + 1..].iter().filter(|v| **v < tuple[j]).count();
        rank = rank * (k - j) + smaller;
    }
    rank
}

pub(crate) fn lehmer_unrank(k: usize, mut index: usize) -> Vec<u8> {
    let mut digits = vec![0usize; k];
    for j in (0..k).rev() {
        let radix = k - j;
        digits[j] = index % radix;
        index /= radix;
    }
    let mut pool: Vec<u8> = (1..=k as u8).collect();
    digits.iter().map(|&d| pool.remove(d)).collect()
}

pub(crate) fn check_order(order: usize, min: usize, max: usize) -> Result<()> {
    if order < min || order > max {
        return Err(Error::OrderOutOfRange { order, min, max });
    }
    Ok(())
}

/// Which counting path produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Oracle,
    Fast,
    Fallback,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Fast => "fast",
            Method::Fallback => "fallback",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exact counts of all `k!` patterns of order `k` over the `C(n, k)` increasing index tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub order: usize,
    pub n: usize,
    pub counts: Vec<u128>,
    pub method: Method,
}

impl Profile {
    pub fn zeros(order: usize, n: usize, method: Method) -> Self {
        Profile {
            order,
            n,
            counts: vec![0; factorial(order)],
            method,
        }
    }

    pub fn count(&self, p: PatternId) -> u128 {
        debug_assert_eq!(p.order(), self.order);
        self.counts[p.index()]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }

    pub fn expected_total(&self) -> u128 {
        binomial(self.n as u64, self.order as u64)
    }

    /// The profile with every pattern relabelled through `op`.
    pub fn mapped(&self, op: Symmetry) -> Profile {
        let mut out = Profile::zeros(self.order, self.n, self.method);
        for p in PatternId::all(self.order) {
            out.counts[p.apply(op).index()] = self.counts[p.index()];
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (PatternId, u128)> + '_ {
        PatternId::all(self.order).zip(self.counts.iter().copied())
    }

    pub fn to_json(&self) -> Value {
        let counts: serde_json::Map<String, Value> = self
            .iter()
            .map(|(p, c)| (p.to_string(), Value::String(c.to_string())))
            .collect();
        json!({
            "order": self.order,
            "n": self.n,
            "counts": counts,
            "method": self.method.as_str(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Profile> {
        let bad = |what: &str| Error::Parse(format!("profile json: {what}"));
        let order = v["order"].as_u64().ok_or_else(|| bad("order"))? as usize;
        let n = v["n"].as_u64().ok_or_else(|| bad("n"))? as usize;
        check_order(order, 1, MAX_PATTERN_ORDER)?;
        let method = match v["method"].as_str() {
            Some("fast") => Method::Fast,
            Some("fallback") => Method::Fallback,
            _ => Method::Oracle,
        };
        let mut out = Profile::zeros(order, n, method);
        let obj = v["counts"].as_object().ok_or_else(|| bad("counts"))?;
        for (key, val) in obj {
            let p = PatternId::parse(key)?;
            if p.order() != order {
                return Err(bad("pattern order mismatch"));
            }
            let c = match val {
                Value::String(s) => s.parse::<u128>().map_err(|_| bad("count"))?,
                Value::Number(num) => num.as_u64().ok_or_else(|| bad("count"))? as u128,
                _ => return Err(bad("count")),
            };
            out.counts[p.index()] = c;
        }
        Ok(out)
    }
}

/// Ground-truth profile by enumerating every increasing index tuple.
pub fn oracle_profile(rs: &RankSequence, k: usize) -> Result<Profile> {
    oracle_profile_with_budget(rs, k, DEFAULT_ORACLE_BUDGET)
}

pub fn oracle_profile_with_budget(rs: &RankSequence, k: usize, budget: u128) -> Result<Profile> {
    check_order(k, 2, MAX_PATTERN_ORDER)?;
    let n = rs.len();
    let tuples = binomial(n as u64, k as u64);
    if tuples > budget {
        return Err(Error::BudgetExceeded {
            tuples,
            cap: budget,
        });
    }
    let mut profile = Profile::zeros(k, n, Method::Oracle);
    if n < k {
        return Ok(profile);
    }
    let x = rs.ranks();
    let size = profile.counts.len();
    // Parallel over the first index; integer sums make the reduction order irrelevant.
    let partials: Vec<Vec<u128>> = (0..=n - k)
        .into_par_iter()
        .map(|first| {
            let mut counts = vec![0u128; size];
            let mut idx: Vec<usize> = (first..first + k).collect();
            let mut buf = vec![0u32; k];
            loop {
                for (b, &i) in buf.iter_mut().zip(&idx) {
                    *b = x[i];
                }
                counts[lehmer_rank(&buf)] += 1;
                // advance positions 1..k in lexicographic order, keeping idx[0] fixed
                let mut pos = k - 1;
                loop {
                    if pos == 0 {
                        return counts;
                    }
                    if idx[pos] < n - k + pos {
                        idx[pos] += 1;
                        for q in pos + 1..k {
                            idx[q] = idx[q - 1] + 1;
                        }
                        break;
                    }
                    pos -= 1;
                }
            }
        })
        .collect();
    for part in partials {
        for (c, p) in profile.counts.iter_mut().zip(part) {
            *c += p;
        }
    }
    Ok(profile)
}
