//! Time series, rank sequences and sliding windows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-empty sequence of finite real values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(TimeSeries(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// The series read backwards in time.
    pub fn reversed(&self) -> TimeSeries {
        TimeSeries(self.0.iter().rev().copied().collect())
    }

    pub fn ranks(&self) -> RankSequence {
        rank_values(&self.0)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { index, value });
    }
    Ok(())
}

/// A permutation of `1..=n` obtained by ranking a series; ties go to the earlier index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankSequence(Vec<u32>);

impl RankSequence {
    /// Wraps 1-based ranks, checking they form a permutation of `1..=n`.
    pub fn from_ranks(ranks: Vec<u32>) -> Result<Self> {
        let n = ranks.len();
        let mut seen = vec![false; n];
        for &r in &ranks {
            let r = r as usize;
            if r == 0 || r > n || seen[r - 1] {
                return Err(Error::InvalidParameter(format!(
                    "ranks are not a permutation of 1..={n}"
                )));
            }
            seen[r - 1] = true;
        }
        Ok(RankSequence(ranks))
    }

    /// The identity permutation `1, 2, ..., n`.
    pub fn identity(n: usize) -> Self {
        RankSequence((1..=n as u32).collect())
    }

    pub fn ranks(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Time reversal.
    pub fn reversed(&self) -> RankSequence {
        RankSequence(self.0.iter().rev().copied().collect())
    }

    /// Value complement `r -> n + 1 - r`.
    pub fn complemented(&self) -> RankSequence {
        let n = self.0.len() as u32;
        RankSequence(self.0.iter().map(|&r| n + 1 - r).collect())
    }

    /// Re-ranks a contiguous sub-range (0-based, half-open).
    pub fn window(&self, start: usize, end: usize) -> RankSequence {
        let vals: Vec<f64> = self.0[start..end].iter().map(|&r| r as f64).collect();
        rank_values(&vals)
    }
}

/// Ranks a validated slice. Stable sort by `(value, index)`.
pub(crate) fn rank_values(values: &[f64]) -> RankSequence {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite values")
            .then(a.cmp(&b))
    });
    let mut ranks = vec![0u32; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        ranks[i] = rank as u32 + 1;
    }
    RankSequence(ranks)
}

/// Rank a raw slice of values. Rejects empty input and non-finite values.
pub fn rank_series(values: &[f64]) -> Result<RankSequence> {
    check_values(values)?;
    Ok(rank_values(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub width: usize,
    pub stride: usize,
}

impl WindowSpec {
    pub fn new(width: usize, stride: usize) -> Self {
        WindowSpec { width, stride }
    }

    pub fn unit_stride(width: usize) -> Self {
        WindowSpec { width, stride: 1 }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.width < 2 || self.stride < 1 || self.width > len {
            return Err(Error::InvalidWindow {
                width: self.width,
                stride: self.stride,
                len,
            });
        }
        Ok(())
    }

    /// Number of windows over a series of length `len`.
    pub fn count(&self, len: usize) -> usize {
        if self.width > len || self.stride == 0 {
            0
        } else {
            (len - self.width) / self.stride + 1
        }
    }
}

/// A window view; `end` is the 1-based time index of its last point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<'a> {
    pub end: usize,
    pub values: &'a [f64],
}

/// Windows ending at `t = w, w + stride, ...`.
pub fn sliding_windows<'a>(
    values: &'a [f64],
    spec: WindowSpec,
) -> Result<impl ExactSizeIterator<Item = Window<'a>> + 'a> {
    spec.validate(values.len())?;
    let count = spec.count(values.len());
    Ok((0..count).map(move |i| {
        let start = i * spec.stride;
        Window {
            end: start + spec.width,
            values: &values[start..start + spec.width],
        }
    }))
}
