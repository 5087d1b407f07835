//! Sliding-window entropy series, window-size sweeps and the half-period heuristic.
//!
//! Windows are end-aligned: the value at time `t` (1-based) is the entropy of
//! `x[t-w+1..=t]`. Each window is re-ranked and its profile recomputed from scratch.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::entropy::{ctpe, gpe, pe, pe_avg, CtpeOptions, Delay, EntropyKind, EntropyValue};
use crate::error::{Error, Result};
use crate::math::binomial;
use crate::profile::{sample_size_adequate, ProfileOptions};
use crate::series::{rank_values, RankSequence, TimeSeries, WindowSpec};

/// Delay selection for PE-type measures.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum DelayChoice {
    /// `tau = 1` for PE; every feasible delay of the window for PEavg.
    #[default]
    Default,
    Single(usize),
    Set(Vec<usize>),
    /// Every delay feasible for the window width.
    AllFeasible,
}

/// Everything besides kind, order and width that an entropy evaluation needs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntropyParams {
    pub delay: DelayChoice,
    pub profile: ProfileOptions,
    pub ctpe: CtpeOptions,
}

impl EntropyParams {
    /// The concrete delay set for a window of width `w`; `Delay::None` for GPE and CTPE.
    pub fn resolve_delay(&self, kind: EntropyKind, k: usize, w: usize) -> Result<Delay> {
        match kind {
            EntropyKind::Gpe | EntropyKind::Ctpe => Ok(Delay::None),
            EntropyKind::Pe => match &self.delay {
                DelayChoice::Default => Ok(Delay::Single(1)),
                DelayChoice::Single(t) => Ok(Delay::Single(*t)),
                DelayChoice::Set(_) | DelayChoice::AllFeasible => Err(Error::InvalidParameter(
                    "PE takes a single delay; use peavg for delay sets".into(),
                )),
            },
            EntropyKind::PeAvg => match &self.delay {
                DelayChoice::Default | DelayChoice::AllFeasible => {
                    Ok(Delay::Set(feasible_delays(w, k)?.collect()))
                }
                DelayChoice::Single(t) => Ok(Delay::Set(vec![*t])),
                DelayChoice::Set(ts) if ts.is_empty() => Err(Error::EmptyDelaySet),
                DelayChoice::Set(ts) => Ok(Delay::Set(ts.clone())),
            },
        }
    }
}

/// Entropy of one rank sequence for an already-resolved delay.
pub fn evaluate(
    rs: &RankSequence,
    kind: EntropyKind,
    k: usize,
    delay: &Delay,
    params: &EntropyParams,
) -> Result<EntropyValue> {
    match (kind, delay) {
        (EntropyKind::Gpe, _) => gpe(rs, k, &params.profile),
        (EntropyKind::Ctpe, _) => ctpe(rs, k, &params.ctpe),
        (EntropyKind::Pe, Delay::Single(t)) => pe(rs, k, *t),
        (EntropyKind::PeAvg, Delay::Set(ts)) => pe_avg(rs, k, ts),
        (EntropyKind::Pe, _) => pe(rs, k, 1),
        (EntropyKind::PeAvg, d) => Err(Error::InvalidParameter(format!(
            "peavg needs a delay set, got {d:?}"
        ))),
    }
}

/// Configuration echo of an [`EntropySeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesConfig {
    pub kind: EntropyKind,
    pub order: usize,
    pub delay: Delay,
    pub width: usize,
    pub stride: usize,
}

/// Normalized entropies `Y_t` for `t = t_start, t_start + stride, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    pub t_start: usize,
    pub values: Vec<f64>,
    pub config: SeriesConfig,
}

impl EntropySeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based end times of the windows.
    pub fn times(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).map(|i| self.t_start + i * self.config.stride)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// CSV with columns `t,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,value")?;
        for (t, v) in self.times().zip(&self.values) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

/// Windowed entropy of `ts`, stride 1.
pub fn windowed_entropy(
    ts: &TimeSeries,
    kind: EntropyKind,
    k: usize,
    w: usize,
    params: &EntropyParams,
) -> Result<EntropySeries> {
    windowed_entropy_strided(ts, kind, k, WindowSpec::unit_stride(w), params)
}

pub fn windowed_entropy_strided(
    ts: &TimeSeries,
    kind: EntropyKind,
    k: usize,
    spec: WindowSpec,
    params: &EntropyParams,
) -> Result<EntropySeries> {
    let n = ts.len();
    spec.validate(n)?;
    let w = spec.width;
    let delay = params.resolve_delay(kind, k, w)?;
    let values = (0..spec.count(n))
        .into_par_iter()
        .map(|i| {
            let start = i * spec.stride;
            let window = rank_values(&ts.values()[start..start + w]);
            evaluate(&window, kind, k, &delay, params)
                .map(|v| v.normalized)
                .map_err(|e| e.context(format!("window ending at t={}", start + w)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropySeries {
        t_start: w,
        values,
        config: SeriesConfig {
            kind,
            order: k,
            delay,
            width: w,
            stride: spec.stride,
        },
    })
}

/// Delays admitting at least one `k`-tuple in a width-`w` window: `1..=(w-1)/(k-1)`.
pub fn feasible_delays(w: usize, k: usize) -> Result<RangeInclusive<usize>> {
    if k < 2 || w < k {
        return Err(Error::EmptyDelaySet);
    }
    Ok(1..=(w - 1) / (k - 1))
}

/// Mean windowed entropy per window size.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub windows: Vec<usize>,
    pub means: Vec<f64>,
}

impl SweepCurve {
    pub fn new(windows: Vec<usize>, means: Vec<f64>) -> Result<Self> {
        if windows.len() != means.len() {
            return Err(Error::InvalidParameter(
                "window and mean counts differ".into(),
            ));
        }
        if windows.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidParameter(
                "window sizes must be strictly increasing".into(),
            ));
        }
        Ok(SweepCurve { windows, means })
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// CSV with columns `window,mean_entropy`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "window,mean_entropy")?;
        for (w, m) in self.windows.iter().zip(&self.means) {
            writeln!(out, "{w},{m}")?;
        }
        Ok(())
    }
}

/// For each `w`, the mean over every window of every realization, weighted uniformly
/// per window (longer realizations contribute more windows).
pub fn window_size_sweep(
    realizations: &[TimeSeries],
    kind: EntropyKind,
    k: usize,
    w_range: RangeInclusive<usize>,
    params: &EntropyParams,
) -> Result<SweepCurve> {
    if realizations.is_empty() {
        return Err(Error::InvalidParameter("no realizations to sweep".into()));
    }
    let windows: Vec<usize> = w_range.collect();
    if windows.is_empty() {
        return Err(Error::InvalidParameter("empty window range".into()));
    }
    let jobs: Vec<(usize, usize)> = windows
        .iter()
        .flat_map(|&w| (0..realizations.len()).map(move |r| (w, r)))
        .collect();
    let sums = jobs
        .par_iter()
        .map(|&(w, r)| {
            let s = windowed_entropy(&realizations[r], kind, k, w, params)
                .map_err(|e| e.context(format!("realization {r}, w={w}")))?;
            Ok((s.values.iter().sum::<f64>(), s.len()))
        })
        .collect::<Result<Vec<_>>>()?;
    let means = sums
        .chunks(realizations.len())
        .map(|chunk| {
            let (total, count) = chunk
                .iter()
                .fold((0.0, 0usize), |(t, c), &(s, l)| (t + s, c + l));
            total / count as f64
        })
        .collect();
    SweepCurve::new(windows, means)
}

/// The default sweep: smallest `w` with `C(w, k) >= 100 k!` up to `n / 2`.
pub fn default_sweep_range(n: usize, k: usize) -> Result<RangeInclusive<usize>> {
    let lo = (k..=n.max(k))
        .find(|&w| sample_size_adequate(w, k))
        .unwrap_or(usize::MAX);
    let hi = n / 2;
    if lo > hi {
        return Err(Error::InsufficientData(format!(
            "no window up to n/2 = {hi} has C(w,{k}) >= 100*{k}!"
        )));
    }
    Ok(lo..=hi)
}

/// Result of the half-period heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfPeriodEstimate {
    /// Argmin of the sweep curve; approximately half the dominant period.
    pub window: usize,
    /// Recommended working range `[window, 2 * window]`.
    pub range: (usize, usize),
    /// False when the minimum sits on the first or last swept window.
    pub interior: bool,
}

/// Argmin of the curve, ties toward the smallest window.
pub fn estimate_half_period(curve: &SweepCurve) -> Result<HalfPeriodEstimate> {
    let (idx, _) = curve
        .means
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &m)| match best {
            Some((_, b)) if b <= m => best,
            _ => Some((i, m)),
        })
        .ok_or_else(|| Error::InvalidParameter("empty sweep curve".into()))?;
    let w = curve.windows[idx];
    let last = curve.len() - 1;
    let interior = idx != 0 && idx != last;
    if !interior {
        log::warn!("sweep minimum at boundary window {w}; the half-period estimate is unreliable");
    }
    Ok(HalfPeriodEstimate {
        window: w,
        range: (w, 2 * w),
        interior,
    })
}

/// Number of `k`-tuples that contain a fixed point of a width-`w` window.
pub fn tuples_through_point(w: usize, k: usize) -> u128 {
    if w == 0 || k == 0 {
        return 0;
    }
    binomial(w as u64 - 1, k as u64 - 1)
}
