//! Convergence of GPE and PE toward 1 on white noise as the window grows.

use rayon::prelude::*;
use serde_json::{json, Map};

use super::config::{join, KeyValues};
use super::report::{fmt_f64, fmt_opt, ExperimentReport, Table};
use super::rng::Rng;
use super::signal::{gen_signal, SignalSpec};
use super::stats::mean;
use crate::entropy::{gpe_from_profile, pe};
use crate::error::{Error, Result};
use crate::profile::{prefix_profiles, ProfileOptions, MAX_ORDER, MIN_ORDER};
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceSignal {
    Iid,
    /// Strictly increasing input; every curve is identically 0.
    Monotone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub seed: u64,
    pub series: usize,
    pub length: usize,
    pub orders: Vec<usize>,
    pub signal: ConvergenceSignal,
    pub guard: u128,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            seed: 0,
            series: 100,
            length: 50,
            orders: (2..=6).collect(),
            signal: ConvergenceSignal::Iid,
            guard: ProfileOptions::default().guard,
        }
    }
}

impl ConvergenceConfig {
    pub(crate) fn from_kv(kv: &mut KeyValues) -> Result<Self> {
        let d = ConvergenceConfig::default();
        let signal = match kv.take_str("signal").as_deref() {
            None | Some("iid") => ConvergenceSignal::Iid,
            Some("monotone") => ConvergenceSignal::Monotone,
            Some(s) => return Err(Error::Parse(format!("unknown convergence signal `{s}`"))),
        };
        Ok(ConvergenceConfig {
            seed: kv.take("seed", d.seed)?,
            series: kv.take("series", d.series)?,
            length: kv.take("length", d.length)?,
            orders: kv.take_list("orders", &d.orders)?,
            signal,
            guard: kv.take("guard", d.guard)?,
        })
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        let signal = match self.signal {
            ConvergenceSignal::Iid => "iid",
            ConvergenceSignal::Monotone => "monotone",
        };
        [
            ("experiment", "convergence".to_string()),
            ("series", self.series.to_string()),
            ("length", self.length.to_string()),
            ("orders", join(&self.orders)),
            ("signal", signal.to_string()),
            ("guard", self.guard.to_string()),
            ("seed", self.seed.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }
}

/// `curves[order index][length - 1] = (gpe, pe)`, `None` below the order.
type Curves = Vec<Vec<(Option<f64>, Option<f64>)>>;

fn one_series(c: &ConvergenceConfig, s: usize) -> Result<Curves> {
    let ts = match c.signal {
        ConvergenceSignal::Iid => gen_signal(
            &SignalSpec::Iid {
                n: c.length,
                variance: 1.0,
            },
            &mut Rng::new(c.seed, s as u64),
        )?,
        ConvergenceSignal::Monotone => TimeSeries::new((0..c.length).map(|i| i as f64).collect())?,
    };
    let rs = ts.ranks();
    let opts = ProfileOptions {
        guard: c.guard,
        ..Default::default()
    };
    c.orders
        .iter()
        .map(|&k| {
            let profiles = match prefix_profiles(&rs, k, &opts) {
                Ok(p) => p,
                Err(e) if e.is_guard() => {
                    log::info!("series {s}, order {k}: GPE skipped ({e})");
                    vec![]
                }
                Err(e) => return Err(e),
            };
            (1..=c.length)
                .map(|len| {
                    if len < k {
                        return Ok((None, None));
                    }
                    let g = match profiles.get(len - 1) {
                        Some(p) => Some(gpe_from_profile(p)?.normalized),
                        None => None,
                    };
                    Ok((g, Some(pe(&rs.window(0, len), k, 1)?.normalized)))
                })
                .collect()
        })
        .collect::<Result<_>>()
        .map_err(|e: Error| e.context(format!("series {s}")))
}

pub fn run_convergence(c: &ConvergenceConfig) -> Result<ExperimentReport> {
    if c.series == 0 || c.length == 0 {
        return Err(Error::InvalidParameter(
            "series and length must be positive".into(),
        ));
    }
    for &k in &c.orders {
        crate::patterns::check_order(k, MIN_ORDER, MAX_ORDER)?;
    }
    let all: Vec<Curves> = (0..c.series)
        .into_par_iter()
        .map(|s| one_series(c, s))
        .collect::<Result<_>>()?;

    let avg = |xs: Vec<Option<f64>>| -> Option<f64> {
        xs.into_iter()
            .collect::<Option<Vec<f64>>>()
            .map(|v| mean(&v))
    };
    let mut cols: Vec<String> = vec!["length".into()];
    for &k in &c.orders {
        cols.push(format!("gpe_k{k}"));
        cols.push(format!("pe_k{k}"));
    }
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut curves = Table::new("curves", &col_refs);
    let mut finals = Map::new();
    for len in 1..=c.length {
        let mut row = vec![len.to_string()];
        for (ki, &k) in c.orders.iter().enumerate() {
            let g = avg(all.iter().map(|s| s[ki][len - 1].0).collect());
            let p = avg(all.iter().map(|s| s[ki][len - 1].1).collect());
            row.push(fmt_opt(g));
            row.push(fmt_opt(p));
            if len == c.length {
                finals.insert(format!("k{k}"), json!({ "gpe": g, "pe": p }));
            }
        }
        curves.push(row);
    }

    let mut per = Table::new("realizations", &["series", "length", "order", "gpe", "pe"]);
    for (s, curves) in all.iter().enumerate() {
        for (ki, &k) in c.orders.iter().enumerate() {
            for len in k..=c.length {
                let (g, p) = curves[ki][len - 1];
                per.push(vec![
                    s.to_string(),
                    len.to_string(),
                    k.to_string(),
                    fmt_opt(g),
                    p.map(fmt_f64).unwrap_or_default(),
                ]);
            }
        }
    }

    let mut report = ExperimentReport::new("convergence", c.seed, c.echo());
    report
        .summary
        .insert("final_length".into(), json!(c.length));
    report
        .summary
        .insert("mean_at_final_length".into(), finals.into());
    report.tables.push(curves);
    report.tables.push(per);
    Ok(report)
}
