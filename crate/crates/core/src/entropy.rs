//! Shannon entropies of pattern distributions.
//!
//! All logarithms are natural; raw values are in nats. Normalized GPE and PE
//! divide by `ln(k!)`, which makes them independent of the log base.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde_json::{json, Value};

use crate::cornertree::{independent_trees, CornerTree, TreeCounter};
use crate::error::{Error, Result};
use crate::math::{binomial, factorial};
use crate::patterns::{check_order, lehmer_rank, MAX_PATTERN_ORDER};
use crate::profile::{profile, ProfileOptions};
use crate::series::RankSequence;

/// Entropy of non-negative weights, normalized to probabilities. `0 ln 0 = 0`.
pub fn shannon(weights: &[f64]) -> Result<f64> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidParameter(
            "weights must be finite and non-negative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedDistribution);
    }
    Ok(non_negative(
        weights
            .iter()
            .filter(|&&w| w > 0.0)
            .map(|&w| {
                let p = w / total;
                -p * p.ln()
            })
            .sum(),
    ))
}

/// [`shannon`] over integer counts; each probability is one division of exact integers.
pub fn shannon_counts<C: Copy + Into<u128>>(counts: &[C]) -> Result<f64> {
    let total: u128 = counts.iter().map(|&c| c.into()).sum();
    if total == 0 {
        return Err(Error::UndefinedDistribution);
    }
    let total = total as f64;
    Ok(non_negative(
        counts
            .iter()
            .map(|&c| c.into())
            .filter(|&c| c > 0)
            .map(|c| {
                let p = c as f64 / total;
                -p * p.ln()
            })
            .sum(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyKind {
    Gpe,
    Pe,
    PeAvg,
    Ctpe,
}

impl EntropyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntropyKind::Gpe => "gpe",
            EntropyKind::Pe => "pe",
            EntropyKind::PeAvg => "peavg",
            EntropyKind::Ctpe => "ctpe",
        }
    }
}

impl fmt::Display for EntropyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntropyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gpe" => Ok(EntropyKind::Gpe),
            "pe" => Ok(EntropyKind::Pe),
            "peavg" | "pe_avg" => Ok(EntropyKind::PeAvg),
            "ctpe" => Ok(EntropyKind::Ctpe),
            _ => Err(Error::InvalidParameter(format!(
                "unknown entropy kind {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Delay {
    None,
    Single(usize),
    Set(Vec<usize>),
}

impl Delay {
    fn to_json(&self) -> Value {
        match self {
            Delay::None => Value::Null,
            Delay::Single(t) => json!(t),
            Delay::Set(ts) => json!(ts),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyValue {
    pub kind: EntropyKind,
    pub order: usize,
    pub delay: Delay,
    /// Nats.
    pub raw: f64,
    /// In `[0, 1]`.
    pub normalized: f64,
    pub sample_size: u128,
    /// Counting path for GPE, `consecutive` for PE, basis description for CTPE.
    pub method: String,
    /// Divisor used for `normalized`, e.g. `ln(3!)` or `ln(m=6)`.
    pub normalization: String,
}

impl EntropyValue {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.as_str(),
            "order": self.order,
            "delay": self.delay.to_json(),
            "raw_nats": self.raw,
            "normalized": self.normalized,
            "sample_size": self.sample_size.to_string(),
            "method": self.method,
            "normalization": self.normalization,
        })
    }
}

fn normalize(raw: f64, states: usize) -> f64 {
    if states <= 1 {
        return 0.0;
    }
    non_negative(raw / (states as f64).ln()).min(1.0)
}

/// Maps `-0.0` and rounding noise below zero to `0.0`.
fn non_negative(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x
    }
}

/// Global permutation entropy of order `k` from the full profile.
pub fn gpe(rs: &RankSequence, k: usize, opts: &ProfileOptions) -> Result<EntropyValue> {
    check_order(k, 2, crate::profile::MAX_ORDER)?;
    let n = rs.len();
    if n < k {
        return Err(Error::InsufficientData(format!(
            "GPE of order {k} needs at least {k} points, got {n}"
        )));
    }
    let p = profile(rs, k, opts)?;
    gpe_from_profile(&p)
}

pub fn gpe_from_profile(p: &crate::patterns::Profile) -> Result<EntropyValue> {
    let raw = shannon_counts(&p.counts)?;
    Ok(EntropyValue {
        kind: EntropyKind::Gpe,
        order: p.order,
        delay: Delay::None,
        raw,
        normalized: normalize(raw, factorial(p.order)),
        sample_size: binomial(p.n as u64, p.order as u64),
        method: p.method.to_string(),
        normalization: format!("ln({}!)", p.order),
    })
}

fn check_delay(n: usize, k: usize, tau: usize) -> Result<usize> {
    if tau == 0 || tau.saturating_mul(k - 1) >= n {
        return Err(Error::InfeasibleDelay {
            delay: tau,
            order: k,
            len: n,
        });
    }
    Ok(n - tau * (k - 1))
}

/// Histogram over Lehmer ranks of the `n - tau (k - 1)` delay-embedded tuples.
pub fn pe_histogram(x: &[u32], k: usize, tau: usize) -> Result<Vec<u64>> {
    check_order(k, 2, MAX_PATTERN_ORDER)?;
    let samples = check_delay(x.len(), k, tau)?;
    let mut hist = vec![0u64; factorial(k)];
    let mut buf = vec![0u32; k];
    for i in 0..samples {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = x[i + j * tau];
        }
        hist[lehmer_rank(&buf)] += 1;
    }
    Ok(hist)
}

/// Classical permutation entropy of order `k` with delay `tau`.
pub fn pe(rs: &RankSequence, k: usize, tau: usize) -> Result<EntropyValue> {
    let hist = pe_histogram(rs.ranks(), k, tau)?;
    let samples: u64 = hist.iter().sum();
    let raw = shannon_counts(&hist)?;
    Ok(EntropyValue {
        kind: EntropyKind::Pe,
        order: k,
        delay: Delay::Single(tau),
        raw,
        normalized: normalize(raw, factorial(k)),
        sample_size: samples as u128,
        method: "consecutive".into(),
        normalization: format!("ln({k}!)"),
    })
}

/// Mean of normalized PE over a delay set. `sample_size` is the smallest per-delay sample.
pub fn pe_avg(rs: &RankSequence, k: usize, delays: &[usize]) -> Result<EntropyValue> {
    if delays.is_empty() {
        return Err(Error::EmptyDelaySet);
    }
    let values = delays
        .iter()
        .map(|&tau| pe(rs, k, tau))
        .collect::<Result<Vec<_>>>()?;
    let m = values.len() as f64;
    let normalized = values.iter().map(|v| v.normalized).sum::<f64>() / m;
    Ok(EntropyValue {
        kind: EntropyKind::PeAvg,
        order: k,
        delay: Delay::Set(delays.to_vec()),
        raw: values.iter().map(|v| v.raw).sum::<f64>() / m,
        normalized,
        sample_size: values.iter().map(|v| v.sample_size).min().unwrap_or(0),
        method: "consecutive".into(),
        normalization: format!("mean of ln({k}!)-normalized values"),
    })
}

/// Limits on tree-set construction for corner-tree entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CtpeOptions {
    /// Maximum number of candidate trees enumerated for selection.
    pub max_candidates: usize,
}

impl Default for CtpeOptions {
    fn default() -> Self {
        // admits orders up to 5; order 6 has far more candidates
        CtpeOptions {
            max_candidates: 5_000,
        }
    }
}

/// The maximal independent `k`-vertex tree set used by [`ctpe`], cached per order.
pub fn ctpe_trees(k: usize, opts: &CtpeOptions) -> Result<Arc<Vec<CornerTree>>> {
    check_order(k, 2, crate::cornertree::MAX_TREE_VERTICES)?;
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<CornerTree>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&k) {
        return Ok(hit.clone());
    }
    let trees = Arc::new(independent_trees(k, opts.max_candidates)?);
    cache.lock().unwrap().insert(k, trees.clone());
    Ok(trees)
}

/// Corner-tree entropy: Shannon entropy of the occurrence counts of a maximal
/// independent set of `k`-vertex trees, normalized by `ln(m)` for `m` trees.
pub fn ctpe(rs: &RankSequence, k: usize, opts: &CtpeOptions) -> Result<EntropyValue> {
    let trees = ctpe_trees(k, opts)?;
    let mut counter = TreeCounter::new();
    let counts: Vec<u128> = trees.iter().map(|t| counter.count(t, rs)).collect();
    let raw = shannon_counts(&counts)?;
    let m = trees.len();
    Ok(EntropyValue {
        kind: EntropyKind::Ctpe,
        order: k,
        delay: Delay::None,
        raw,
        normalized: normalize(raw, m),
        sample_size: counts.iter().sum(),
        method: format!("corner-trees(m={m})"),
        normalization: format!("ln(m={m})"),
    })
}
