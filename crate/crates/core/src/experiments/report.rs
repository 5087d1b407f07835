//! Experiment reports: named CSV tables plus a JSON summary, both byte-deterministic.

use serde_json::{json, Map, Value};

use super::rng::RNG_ALGORITHM;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// Shortest round-trip decimal; `NaN` for undefined values.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: u64,
    /// Fully resolved configuration, defaults included, in canonical key order.
    pub config: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64, config: Vec<(String, String)>) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            seed,
            config,
            tables: vec![],
            summary: Map::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self
            .config
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({
            "experiment": self.experiment,
            "seed": self.seed,
            "rng": RNG_ALGORITHM,
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "tables": self.tables.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
            "results": Value::Object(self.summary.clone()),
        })
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    /// `(file name, contents)` for every output, summary last.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .tables
            .iter()
            .map(|t| (format!("{}_{}.csv", self.experiment, t.name), t.to_csv()))
            .collect();
        out.push((
            format!("{}_summary.json", self.experiment),
            self.summary_json(),
        ));
        out
    }
}
