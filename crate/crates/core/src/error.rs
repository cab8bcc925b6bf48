use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("incomparable supports: state {0} lies outside the reference support")]
    IncomparableSupports(String),
    #[error("reference distribution has zero weight on state {0}")]
    ZeroReferenceWeight(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("statistic undefined on state {0}")]
    UndefinedStatistic(String),
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("enumeration needs {required} branches but the budget is {budget}; {hint}")]
    BudgetExceeded {
        required: String,
        budget: u64,
        hint: &'static str,
    },
    #[error("deck size {n} is outside the dense range 2..={max}; use sampler mode")]
    DenseRange { n: usize, max: usize },
    #[error("predicate never satisfied")]
    PredicateNeverSatisfied,
    #[error("unbalanced coloring: {red} red and {blue} blue vertices")]
    UnbalancedColoring { red: usize, blue: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by exceeding an enumeration or dense-size limit.
    pub fn is_capacity(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::DenseRange { .. })
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
