//! Seeded Monte-Carlo experiments: convergence on white noise, noise-burst
//! detection scored by ROC/AUC, and a sine with linearly growing noise.
//!
//! Run `r` of an experiment draws from stream `r` of the master seed, and results
//! are reduced in run order, so reports do not depend on thread scheduling.

pub mod config;
pub mod convergence;
pub mod noise;
pub mod ramp;
pub mod report;
pub mod rng;
pub mod roc;
pub mod signal;
pub mod stats;

pub use convergence::{run_convergence, ConvergenceConfig, ConvergenceSignal};
pub use noise::{run_noise_detection, NoiseConfig};
pub use ramp::{run_ramp, RampConfig};
pub use report::{ExperimentReport, Table};
pub use rng::Rng;
pub use roc::{roc_auc, RocResult};
pub use signal::{gen_signal, SignalSpec};

use crate::error::{Error, Result};
use config::KeyValues;

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Noise(NoiseConfig),
    Convergence(ConvergenceConfig),
    Ramp(RampConfig),
}

impl ExperimentConfig {
    /// Parses a config file; `experiment = noise | convergence | ramp` selects the kind.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let cfg = match kv.take_str("experiment").as_deref() {
            Some("noise") | Some("noise_detection") => {
                ExperimentConfig::Noise(NoiseConfig::from_kv(&mut kv)?)
            }
            Some("convergence") => {
                ExperimentConfig::Convergence(ConvergenceConfig::from_kv(&mut kv)?)
            }
            Some("ramp") => ExperimentConfig::Ramp(RampConfig::from_kv(&mut kv)?),
            Some(other) => return Err(Error::Parse(format!("unknown experiment `{other}`"))),
            None => return Err(Error::Parse("missing `experiment` key".into())),
        };
        kv.finish()?;
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        match self {
            ExperimentConfig::Noise(c) => c.seed,
            ExperimentConfig::Convergence(c) => c.seed,
            ExperimentConfig::Ramp(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            ExperimentConfig::Noise(c) => c.seed = seed,
            ExperimentConfig::Convergence(c) => c.seed = seed,
            ExperimentConfig::Ramp(c) => c.seed = seed,
        }
    }

    pub fn run(&self) -> Result<ExperimentReport> {
        match self {
            ExperimentConfig::Noise(c) => run_noise_detection(c),
            ExperimentConfig::Convergence(c) => run_convergence(c),
            ExperimentConfig::Ramp(c) => run_ramp(c),
        }
    }
}
