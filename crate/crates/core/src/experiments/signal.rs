//! Synthetic signal families.

use std::f64::consts::{PI, TAU};

use super::rng::Rng;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    /// `n` independent `N(0, variance)` draws.
    Iid { n: usize, variance: f64 },
    /// `slope * t + N(0, variance)` for `t = 1..=n`.
    NoisyLine { n: usize, slope: f64, variance: f64 },
    /// `sin(s) + N(0, variance)` at `n` equispaced `s` in `[0, pi]`.
    NoisySine { n: usize, variance: f64 },
    /// `sin(2 pi t / P) + eps * eta` for `t <= 3P`, unit noise for `3P < t <= 9P/2`.
    NoiseBurst { period: usize, epsilon: f64 },
    /// `sin(2 pi t / P) + t / (10 P) * zeta`, `zeta ~ N(0, variance)`, `t = 1..=10P`.
    RampNoise { period: usize, variance: f64 },
}

/// Variance of the additive noise in the line and sine examples.
pub const SMALL_NOISE_VARIANCE: f64 = 0.025;

impl SignalSpec {
    pub fn noisy_line() -> Self {
        SignalSpec::NoisyLine {
            n: 40,
            slope: 0.05,
            variance: SMALL_NOISE_VARIANCE,
        }
    }

    pub fn noisy_sine() -> Self {
        SignalSpec::NoisySine {
            n: 40,
            variance: SMALL_NOISE_VARIANCE,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            SignalSpec::Iid { .. } => "iid",
            SignalSpec::NoisyLine { .. } => "noisy_line",
            SignalSpec::NoisySine { .. } => "noisy_sine",
            SignalSpec::NoiseBurst { .. } => "noise_burst",
            SignalSpec::RampNoise { .. } => "ramp_noise",
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            SignalSpec::Iid { n, .. }
            | SignalSpec::NoisyLine { n, .. }
            | SignalSpec::NoisySine { n, .. } => n,
            SignalSpec::NoiseBurst { period, .. } => 9 * period / 2,
            SignalSpec::RampNoise { period, .. } => 10 * period,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let variance_ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            SignalSpec::Iid { n, variance }
            | SignalSpec::NoisySine { n, variance }
            | SignalSpec::NoisyLine { n, variance, .. } => {
                if n == 0 {
                    return bad(format!("{}: length must be positive", self.family()));
                }
                if !variance_ok(variance) {
                    return bad(format!(
                        "{}: variance must be > 0, got {variance}",
                        self.family()
                    ));
                }
                if let SignalSpec::NoisyLine { slope, .. } = self {
                    if !slope.is_finite() {
                        return bad("noisy_line: slope must be finite".into());
                    }
                }
            }
            SignalSpec::NoiseBurst { period, epsilon } => {
                if period < 2 {
                    return bad(format!("noise_burst: period must be >= 2, got {period}"));
                }
                if !(epsilon.is_finite() && epsilon >= 0.0) {
                    return bad(format!("noise_burst: epsilon must be >= 0, got {epsilon}"));
                }
            }
            SignalSpec::RampNoise { period, variance } => {
                if period < 2 {
                    return bad(format!("ramp_noise: period must be >= 2, got {period}"));
                }
                if !variance_ok(variance) {
                    return bad(format!("ramp_noise: variance must be > 0, got {variance}"));
                }
            }
        }
        Ok(())
    }
}

/// One realization; noise draws are consumed in time order.
pub fn gen_signal(spec: &SignalSpec, rng: &mut Rng) -> Result<TimeSeries> {
    spec.validate()?;
    let n = spec.len();
    let values: Vec<f64> = match *spec {
        SignalSpec::Iid { variance, .. } => {
            let sd = variance.sqrt();
            (0..n).map(|_| sd * rng.standard_normal()).collect()
        }
        SignalSpec::NoisyLine {
            slope, variance, ..
        } => {
            let sd = variance.sqrt();
            (1..=n)
                .map(|t| slope * t as f64 + sd * rng.standard_normal())
                .collect()
        }
        SignalSpec::NoisySine { variance, .. } => {
            let sd = variance.sqrt();
            let step = if n > 1 { PI / (n - 1) as f64 } else { 0.0 };
            (0..n)
                .map(|i| (i as f64 * step).sin() + sd * rng.standard_normal())
                .collect()
        }
        SignalSpec::NoiseBurst { period, epsilon } => {
            let onset = 3 * period;
            (1..=n)
                .map(|t| {
                    let scale = if t <= onset { epsilon } else { 1.0 };
                    let eta = rng.standard_normal();
                    sine(t, period) + scale * eta
                })
                .collect()
        }
        SignalSpec::RampNoise { period, variance } => {
            let sd = variance.sqrt();
            let horizon = (10 * period) as f64;
            (1..=n)
                .map(|t| sine(t, period) + t as f64 / horizon * sd * rng.standard_normal())
                .collect()
        }
    };
    TimeSeries::new(values)
}

fn sine(t: usize, period: usize) -> f64 {
    (TAU * t as f64 / period as f64).sin()
}
