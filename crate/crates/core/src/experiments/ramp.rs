//! Periodic signal with noise whose standard deviation grows linearly in time.

use rayon::prelude::*;
use serde_json::json;

use super::config::{join, KeyValues};
use super::report::{fmt_f64, ExperimentReport, Table};
use super::rng::Rng;
use super::signal::{gen_signal, SignalSpec};
use super::stats::{mean, sample_sd, spearman};
use crate::analysis::{
    estimate_half_period, window_size_sweep, windowed_entropy, DelayChoice, EntropyParams,
};
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub struct RampConfig {
    pub seed: u64,
    pub periods: Vec<usize>,
    pub variances: Vec<f64>,
    pub realizations: usize,
    pub windows: Vec<usize>,
    pub gpe_orders: Vec<usize>,
    pub pe_orders: Vec<usize>,
    pub pe_delays: Vec<usize>,
    /// Delays averaged for PEavg; empty disables it.
    pub pe_avg_delays: Vec<usize>,
    pub sweep_order: usize,
    pub sweep_min: usize,
    /// `None` sweeps up to one period.
    pub sweep_max: Option<usize>,
}

impl Default for RampConfig {
    fn default() -> Self {
        RampConfig {
            seed: 0,
            periods: vec![60, 120],
            variances: vec![1.0, 4.0],
            realizations: 100,
            windows: vec![30, 45, 60, 150],
            gpe_orders: vec![3, 4],
            pe_orders: vec![3],
            pe_delays: vec![1, 10, 20],
            pe_avg_delays: (1..=10).collect(),
            sweep_order: 3,
            sweep_min: 10,
            sweep_max: None,
        }
    }
}

impl RampConfig {
    pub(crate) fn from_kv(kv: &mut KeyValues) -> Result<Self> {
        let d = RampConfig::default();
        let pe_avg_delays = match kv.take_str("pe_avg_delays").as_deref() {
            None => d.pe_avg_delays.clone(),
            Some("none") => vec![],
            Some(s) => super::config::parse_list(s)
                .map_err(|e| Error::Parse(format!("`pe_avg_delays`: {e}")))?,
        };
        let sweep_max = match kv.take_str("sweep_max").as_deref() {
            None | Some("period") => None,
            Some(s) => Some(
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad `sweep_max` {s}")))?,
            ),
        };
        Ok(RampConfig {
            seed: kv.take("seed", d.seed)?,
            periods: kv.take_list("periods", &d.periods)?,
            variances: kv.take_f64_list("variances", &d.variances)?,
            realizations: kv.take("realizations", d.realizations)?,
            windows: kv.take_list("windows", &d.windows)?,
            gpe_orders: kv.take_list("gpe_orders", &d.gpe_orders)?,
            pe_orders: kv.take_list("pe_orders", &d.pe_orders)?,
            pe_delays: kv.take_list("pe_delays", &d.pe_delays)?,
            pe_avg_delays,
            sweep_order: kv.take("sweep_order", d.sweep_order)?,
            sweep_min: kv.take("sweep_min", d.sweep_min)?,
            sweep_max,
        })
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        let vars: Vec<String> = self.variances.iter().map(|v| fmt_f64(*v)).collect();
        [
            ("experiment", "ramp".to_string()),
            ("periods", join(&self.periods)),
            ("variances", vars.join(",")),
            ("realizations", self.realizations.to_string()),
            ("windows", join(&self.windows)),
            ("gpe_orders", join(&self.gpe_orders)),
            ("pe_orders", join(&self.pe_orders)),
            ("pe_delays", join(&self.pe_delays)),
            (
                "pe_avg_delays",
                if self.pe_avg_delays.is_empty() {
                    "none".into()
                } else {
                    join(&self.pe_avg_delays)
                },
            ),
            ("sweep_order", self.sweep_order.to_string()),
            ("sweep_min", self.sweep_min.to_string()),
            (
                "sweep_max",
                self.sweep_max.map_or("period".into(), |m| m.to_string()),
            ),
            ("seed", self.seed.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// Mean and spread across realizations of one windowed-entropy configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurve {
    pub t_start: usize,
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

impl MeanCurve {
    /// Spearman correlation of the mean curve with time.
    pub fn trend(&self) -> f64 {
        let t: Vec<f64> = (0..self.mean.len())
            .map(|i| (self.t_start + i) as f64)
            .collect();
        spearman(&t, &self.mean)
    }

    /// First time the mean curve reaches 95% of its maximum.
    pub fn saturation_time(&self) -> usize {
        let max = self.mean.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let i = self.mean.iter().position(|&v| v >= 0.95 * max).unwrap_or(0);
        self.t_start + i
    }
}

/// Averages the windowed entropy of every realization at each time.
pub fn mean_curve(
    realizations: &[TimeSeries],
    kind: EntropyKind,
    k: usize,
    w: usize,
    params: &EntropyParams,
) -> Result<MeanCurve> {
    let series = realizations
        .par_iter()
        .enumerate()
        .map(|(r, ts)| {
            windowed_entropy(ts, kind, k, w, params)
                .map_err(|e| e.context(format!("realization {r}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let len = series[0].len();
    let at = |i: usize| -> Vec<f64> { series.iter().map(|s| s.values[i]).collect() };
    Ok(MeanCurve {
        t_start: w,
        mean: (0..len).map(|i| mean(&at(i))).collect(),
        sd: (0..len).map(|i| sample_sd(&at(i))).collect(),
    })
}

pub fn realizations(
    period: usize,
    variance: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<TimeSeries>> {
    let spec = SignalSpec::RampNoise { period, variance };
    (0..count)
        .into_par_iter()
        .map(|r| gen_signal(&spec, &mut Rng::new(seed, r as u64)))
        .collect()
}

struct Curve {
    kind: EntropyKind,
    order: usize,
    delay: DelayChoice,
}

impl Curve {
    fn measure(&self) -> &'static str {
        self.kind.as_str()
    }

    fn delay_label(&self) -> String {
        match &self.delay {
            DelayChoice::Single(t) => t.to_string(),
            DelayChoice::Set(ts) => format!("{}..{}", ts[0], ts[ts.len() - 1]),
            _ => String::new(),
        }
    }

    /// Smallest window admitting every delay of the curve.
    fn min_window(&self) -> usize {
        let tau = match &self.delay {
            DelayChoice::Single(t) => *t,
            DelayChoice::Set(ts) => ts.iter().copied().max().unwrap_or(1),
            _ => 0,
        };
        (tau * (self.order - 1) + 1).max(self.order)
    }
}

fn curve_list(c: &RampConfig) -> Vec<Curve> {
    let mut out: Vec<Curve> = c
        .gpe_orders
        .iter()
        .map(|&k| Curve {
            kind: EntropyKind::Gpe,
            order: k,
            delay: DelayChoice::Default,
        })
        .collect();
    for &k in &c.pe_orders {
        out.extend(c.pe_delays.iter().map(|&t| Curve {
            kind: EntropyKind::Pe,
            order: k,
            delay: DelayChoice::Single(t),
        }));
        if !c.pe_avg_delays.is_empty() {
            out.push(Curve {
                kind: EntropyKind::PeAvg,
                order: k,
                delay: DelayChoice::Set(c.pe_avg_delays.clone()),
            });
        }
    }
    out
}

pub fn run_ramp(c: &RampConfig) -> Result<ExperimentReport> {
    if c.realizations == 0 {
        return Err(Error::InvalidParameter(
            "realizations must be positive".into(),
        ));
    }
    let mut report = ExperimentReport::new("ramp", c.seed, c.echo());
    let mut curves = Table::new(
        "curves",
        &[
            "period", "variance", "window", "measure", "order", "delay", "t", "mean", "sd",
        ],
    );
    let mut trends = Table::new(
        "trends",
        &[
            "period",
            "variance",
            "window",
            "measure",
            "order",
            "delay",
            "spearman_t",
            "saturation_t",
        ],
    );
    let mut sweep = Table::new("sweep", &["period", "variance", "window", "mean_entropy"]);
    let mut estimates = vec![];
    let plan = curve_list(c);

    for &period in &c.periods {
        for &variance in &c.variances {
            let reals = realizations(period, variance, c.realizations, c.seed)?;
            let n = 10 * period;
            let key = |w: usize| vec![period.to_string(), fmt_f64(variance), w.to_string()];
            for &w in &c.windows {
                for cv in &plan {
                    if w > n || w < cv.min_window() {
                        log::info!(
                            "skipping {} order {} delay {} at window {w} (P={period}): infeasible",
                            cv.measure(),
                            cv.order,
                            cv.delay_label()
                        );
                        continue;
                    }
                    let params = EntropyParams {
                        delay: cv.delay.clone(),
                        ..Default::default()
                    };
                    let mc = mean_curve(&reals, cv.kind, cv.order, w, &params)?;
                    let mut head = key(w);
                    head.extend([cv.measure().into(), cv.order.to_string(), cv.delay_label()]);
                    for (i, (m, s)) in mc.mean.iter().zip(&mc.sd).enumerate() {
                        let mut row = head.clone();
                        row.extend([(mc.t_start + i).to_string(), fmt_f64(*m), fmt_f64(*s)]);
                        curves.push(row);
                    }
                    let mut row = head;
                    row.extend([fmt_f64(mc.trend()), mc.saturation_time().to_string()]);
                    trends.push(row);
                }
            }

            let hi = c.sweep_max.unwrap_or(period).min(n);
            if c.sweep_min > hi {
                log::info!(
                    "skipping sweep for P={period}: empty range {}..={hi}",
                    c.sweep_min
                );
                continue;
            }
            let sc = window_size_sweep(
                &reals,
                EntropyKind::Gpe,
                c.sweep_order,
                c.sweep_min..=hi,
                &EntropyParams::default(),
            )?;
            for (w, m) in sc.windows.iter().zip(&sc.means) {
                let mut row = key(*w);
                row.push(fmt_f64(*m));
                sweep.push(row);
            }
            let e = estimate_half_period(&sc)?;
            estimates.push(json!({
                "period": period,
                "variance": variance,
                "argmin_window": e.window,
                "recommended_range": [e.range.0, e.range.1],
                "interior": e.interior,
            }));
        }
    }
    report
        .summary
        .insert("half_period".into(), estimates.into());
    report.tables.push(sweep);
    report.tables.push(trends);
    report.tables.push(curves);
    Ok(report)
}
