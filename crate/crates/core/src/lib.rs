//! Permutation-pattern profiles of time series and the entropies built on them.

pub mod analysis;
pub mod cornertree;
pub mod entropy;
pub mod error;
pub mod experiments;
mod fenwick;
pub mod linalg;
pub mod math;
pub mod patterns;
pub mod profile;
pub mod series;

pub use error::{Error, Result};
pub use fenwick::Fenwick;
pub use patterns::{PatternId, Profile};
pub use series::{rank_series, RankSequence, TimeSeries, WindowSpec};
