//! Detecting a noise burst in a periodic signal by thresholding windowed entropy.

use rayon::prelude::*;
use serde_json::json;

use super::config::{join, KeyValues};
use super::report::{fmt_f64, ExperimentReport, Table};
use super::rng::Rng;
use super::roc::roc_auc;
use super::signal::{gen_signal, SignalSpec};
use super::stats::Estimate;
use crate::analysis::{feasible_delays, windowed_entropy, DelayChoice, EntropyParams};
use crate::entropy::EntropyKind;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub seed: u64,
    pub period: usize,
    pub epsilon: f64,
    pub runs: usize,
    pub orders: Vec<usize>,
    pub window_min: usize,
    /// Defaults to `3P/2 + 1`, the widest window whose first value lies in the quiet segment.
    pub window_max: usize,
}

impl NoiseConfig {
    pub fn new(period: usize, epsilon: f64) -> Self {
        NoiseConfig {
            seed: 0,
            period,
            epsilon,
            runs: 100,
            orders: vec![2, 3, 4],
            window_min: 8,
            window_max: segment(period) + 1,
        }
    }

    pub(crate) fn from_kv(kv: &mut KeyValues) -> Result<Self> {
        let period = kv.take("period", 10usize)?;
        let mut c = NoiseConfig::new(period, kv.take("epsilon", 0.25)?);
        c.seed = kv.take("seed", 0u64)?;
        c.runs = kv.take("runs", c.runs)?;
        c.orders = kv.take_list("orders", &c.orders)?;
        c.window_min = kv.take("window_min", c.window_min)?;
        c.window_max = kv.take("window_max", c.window_max)?;
        Ok(c)
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        [
            ("experiment", "noise".to_string()),
            ("period", self.period.to_string()),
            ("epsilon", fmt_f64(self.epsilon)),
            ("runs", self.runs.to_string()),
            ("orders", join(&self.orders)),
            ("window_min", self.window_min.to_string()),
            ("window_max", self.window_max.to_string()),
            ("seed", self.seed.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    fn spec(&self) -> SignalSpec {
        SignalSpec::NoiseBurst {
            period: self.period,
            epsilon: self.epsilon,
        }
    }

    /// 1-based `(quiet, noisy)` time ranges, each `3P/2` long around the onset `3P`.
    pub fn segments(
        &self,
    ) -> (
        std::ops::RangeInclusive<usize>,
        std::ops::RangeInclusive<usize>,
    ) {
        let onset = 3 * self.period;
        let seg = segment(self.period);
        (onset - seg + 1..=onset, onset + 1..=onset + seg)
    }
}

fn segment(period: usize) -> usize {
    3 * period / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Gpe,
    Pe(usize),
    PeAvg,
}

impl Measure {
    fn name(&self) -> &'static str {
        match self {
            Measure::Gpe => "gpe",
            Measure::Pe(_) => "pe",
            Measure::PeAvg => "peavg",
        }
    }
}

/// One scored configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub window: usize,
    pub order: usize,
    pub measure: Measure,
}

impl Cell {
    fn delay_label(&self) -> String {
        match self.measure {
            Measure::Gpe => String::new(),
            Measure::Pe(t) => t.to_string(),
            Measure::PeAvg => {
                let d = feasible_delays(self.window, self.order).expect("checked");
                format!("{}..{}", d.start(), d.end())
            }
        }
    }
}

/// Every feasible (window, order, measure) combination, in report order.
pub fn cells(c: &NoiseConfig) -> Vec<Cell> {
    let (quiet, _) = c.segments();
    let mut out = vec![];
    for w in c.window_min..=c.window_max {
        if w > *quiet.start() {
            log::info!(
                "skipping window {w}: its first value would precede the quiet segment at t={}",
                quiet.start()
            );
            continue;
        }
        for &k in &c.orders {
            let Ok(delays) = feasible_delays(w, k) else {
                log::info!("skipping window {w}, order {k}: window narrower than the order");
                continue;
            };
            out.push(Cell {
                window: w,
                order: k,
                measure: Measure::Gpe,
            });
            out.extend(delays.map(|t| Cell {
                window: w,
                order: k,
                measure: Measure::Pe(t),
            }));
            out.push(Cell {
                window: w,
                order: k,
                measure: Measure::PeAvg,
            });
        }
    }
    out
}

fn run_auc(c: &NoiseConfig, cells: &[Cell], run: usize) -> Result<Vec<f64>> {
    let ts = gen_signal(&c.spec(), &mut Rng::new(c.seed, run as u64))?;
    let (quiet, noisy) = c.segments();
    cells
        .iter()
        .map(|cell| {
            let (kind, delay) = match cell.measure {
                Measure::Gpe => (EntropyKind::Gpe, DelayChoice::Default),
                Measure::Pe(t) => (EntropyKind::Pe, DelayChoice::Single(t)),
                Measure::PeAvg => (EntropyKind::PeAvg, DelayChoice::AllFeasible),
            };
            let params = EntropyParams {
                delay,
                ..Default::default()
            };
            let y = windowed_entropy(&ts, kind, cell.order, cell.window, &params)?;
            let at = |t: usize| y.values[t - y.t_start];
            let q: Vec<f64> = quiet.clone().map(at).collect();
            let n: Vec<f64> = noisy.clone().map(at).collect();
            Ok(roc_auc(&n, &q)?.auc)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e: Error| e.context(format!("run {run}")))
}

pub fn run_noise_detection(c: &NoiseConfig) -> Result<ExperimentReport> {
    c.spec().validate()?;
    if c.runs == 0 {
        return Err(Error::InvalidParameter("runs must be positive".into()));
    }
    let cells = cells(c);
    if cells.is_empty() {
        return Err(Error::InvalidParameter(
            "no feasible window/order combination".into(),
        ));
    }
    // aucs[run][cell]
    let aucs: Vec<Vec<f64>> = (0..c.runs)
        .into_par_iter()
        .map(|r| run_auc(c, &cells, r))
        .collect::<Result<_>>()?;
    let column = |i: usize| -> Vec<f64> { aucs.iter().map(|row| row[i]).collect() };
    let estimates: Vec<Estimate> = (0..cells.len()).map(|i| Estimate::of(&column(i))).collect();

    let mut report = ExperimentReport::new("noise_detection", c.seed, c.echo());
    let mut all = Table::new(
        "auc",
        &[
            "window", "measure", "order", "delay", "mean_auc", "ci_low", "ci_high",
        ],
    );
    for (cell, e) in cells.iter().zip(&estimates) {
        all.push(vec![
            cell.window.to_string(),
            cell.measure.name().into(),
            cell.order.to_string(),
            cell.delay_label(),
            fmt_f64(e.mean),
            fmt_f64(e.low),
            fmt_f64(e.high),
        ]);
    }

    let best = |pick: &dyn Fn(&Cell) -> bool| -> Option<usize> {
        (0..cells.len())
            .filter(|&i| pick(&cells[i]))
            .fold(None, |b: Option<usize>, i| match b {
                Some(j) if estimates[j].mean >= estimates[i].mean => b,
                _ => Some(i),
            })
    };
    let paired = |g: usize, p: usize| -> Estimate {
        let d: Vec<f64> = aucs.iter().map(|row| row[g] - row[p]).collect();
        Estimate::of(&d)
    };

    let mut per_window = Table::new(
        "best_auc",
        &[
            "window",
            "gpe_auc",
            "gpe_ci_low",
            "gpe_ci_high",
            "gpe_order",
            "pe_auc",
            "pe_ci_low",
            "pe_ci_high",
            "pe_measure",
            "pe_order",
            "pe_delay",
            "diff",
            "diff_ci_low",
            "diff_ci_high",
        ],
    );
    let windows: Vec<usize> = {
        let mut w: Vec<usize> = cells.iter().map(|c| c.window).collect();
        w.dedup();
        w
    };
    for &w in &windows {
        let g = best(&|c: &Cell| c.window == w && c.measure == Measure::Gpe);
        let p = best(&|c: &Cell| c.window == w && c.measure != Measure::Gpe);
        let (Some(g), Some(p)) = (g, p) else { continue };
        let d = paired(g, p);
        per_window.push(vec![
            w.to_string(),
            fmt_f64(estimates[g].mean),
            fmt_f64(estimates[g].low),
            fmt_f64(estimates[g].high),
            cells[g].order.to_string(),
            fmt_f64(estimates[p].mean),
            fmt_f64(estimates[p].low),
            fmt_f64(estimates[p].high),
            cells[p].measure.name().into(),
            cells[p].order.to_string(),
            cells[p].delay_label(),
            fmt_f64(d.mean),
            fmt_f64(d.low),
            fmt_f64(d.high),
        ]);
    }

    let describe = |i: usize| {
        json!({
            "window": cells[i].window,
            "measure": cells[i].measure.name(),
            "order": cells[i].order,
            "delay": cells[i].delay_label(),
            "mean_auc": estimates[i].mean,
            "ci": [estimates[i].low, estimates[i].high],
        })
    };
    let g = best(&|c: &Cell| c.measure == Measure::Gpe);
    let p = best(&|c: &Cell| c.measure != Measure::Gpe);
    if let (Some(g), Some(p)) = (g, p) {
        let d = paired(g, p);
        report.summary.insert("best_gpe".into(), describe(g));
        report.summary.insert("best_pe".into(), describe(p));
        report.summary.insert(
            "difference".into(),
            json!({ "mean": d.mean, "ci": [d.low, d.high], "ci_excludes_zero": d.excludes_zero() }),
        );
    }
    report.summary.insert("cells".into(), json!(cells.len()));
    report.tables.push(per_window);
    report.tables.push(all);
    Ok(report)
}
