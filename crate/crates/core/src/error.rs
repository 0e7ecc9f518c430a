use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An enumeration would visit more candidates than the configured guard.
    #[error("infeasible: {what} needs {size} candidates, guard is {guard}")]
    Infeasible { what: String, size: u128, guard: u128 },

    /// The norm-one image changed when the working precision was raised.
    #[error("precision-unstable: norm-one image at level {level} differs between precision {low} and {high}")]
    PrecisionUnstable { level: u32, low: u32, high: u32 },

    #[error("discrete-series: pi_({a},{b}) of U({n_minus_one},1) has a+b = N-1")]
    DiscreteSeries { n_minus_one: u32, a: u32, b: u32 },

    #[error("middle-degree: d = N-1 = {degree}; h^d grows like the volume")]
    MiddleDegree { degree: u32 },

    #[error("budget-exceeded: skipped {}", .skipped.join(", "))]
    BudgetExceeded { skipped: Vec<String> },

    #[error("cache: {0}")]
    Cache(String),

    #[error("report: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
