use num_rational::BigRational;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid landscape: {0}")]
    InvalidLandscape(String),

    #[error("c·|I_1| = {product} is not a natural number")]
    NonIntegralScale { product: BigRational },

    #[error("{what} out of range: {index} not in {lo}..={hi}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        lo: usize,
        hi: usize,
    },

    #[error("expected alpha < beta < gamma, got ({alpha}, {beta}, {gamma})")]
    BadOrdering { alpha: String, beta: String, gamma: String },

    #[error("wall required")]
    WallRequired,

    #[error("digit budget exceeded: interval {index} would have ~{estimated_digits} digits (budget {budget})")]
    DigitBudget {
        index: usize,
        estimated_digits: u64,
        budget: u64,
    },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("landscape has too few traps: {0}")]
    InsufficientTraps(String),

    #[error("landscape does not follow the recursion with c = {c} at interval {index}")]
    NotRecursive { c: BigRational, index: usize },

    #[error("exit set geometry: {0}")]
    ExitGeometry(String),

    #[error("divergent series: ratio {ratio} >= 1")]
    Divergent { ratio: BigRational },

    #[error("illegal trajectory at step {step}: {reason}")]
    IllegalTrajectory { step: usize, reason: String },

    #[error("singular linear system")]
    Singular,

    #[error("search exhausted: {0}")]
    Exhausted(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Budget exhaustion is reported separately from validation failures.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::DigitBudget { .. } | Error::Budget(_))
    }
}
