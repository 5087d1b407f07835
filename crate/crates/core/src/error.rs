use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty time series")]
    EmptySeries,

    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid window: width {width}, stride {stride}, series length {len}")]
    InvalidWindow {
        width: usize,
        stride: usize,
        len: usize,
    },

    #[error("invalid tuple: entries must be pairwise distinct")]
    InvalidTuple,

    #[error("order out of range: {order} (allowed {min}..={max})")]
    OrderOutOfRange {
        order: usize,
        min: usize,
        max: usize,
    },

    #[error("pattern index {index} out of range for order {order}")]
    PatternOutOfRange { order: usize, index: u64 },

    #[error("oracle budget exceeded: C(n,k) = {tuples} tuples, cap {cap}")]
    BudgetExceeded { tuples: u128, cap: u128 },

    #[error(
        "enumeration guard exceeded: C(n,k) = {tuples} tuples, threshold {threshold} \
         (raise it with --guard / ProfileOptions::guard)"
    )]
    GuardExceeded { tuples: u128, threshold: u128 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("undefined distribution: all weights are zero")]
    UndefinedDistribution,

    #[error("infeasible delay {delay} for order {order} on {len} points")]
    InfeasibleDelay {
        delay: usize,
        order: usize,
        len: usize,
    },

    #[error("empty delay set")]
    EmptyDelaySet,

    #[error("invalid corner tree: {0}")]
    InvalidTree(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },
}

impl Error {
    /// True for errors caused by a resource guard rather than bad input.
    pub fn is_guard(&self) -> bool {
        if let Error::Context { source, .. } = self {
            return source.is_guard();
        }
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::GuardExceeded { .. } | Error::LimitExceeded(_)
        )
    }

    pub fn is_internal(&self) -> bool {
        match self {
            Error::Context { source, .. } => source.is_internal(),
            e => matches!(e, Error::Internal(_)),
        }
    }

    /// Wraps the error with a location such as `t=17`.
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            e => e,
        }
    }
}
