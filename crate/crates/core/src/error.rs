use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} for `{name}` is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The evaluator does not apply to the given network.
    #[error("{evaluator} does not apply: {reason}")]
    NotApplicable {
        evaluator: &'static str,
        reason: String,
    },

    /// Parameters violate a feasibility condition of a construction.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("search space too large: {size} exceeds limit {limit}")]
    SearchTooLarge { size: u128, limit: u128 },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error(
        "no code with minimum distance >= {d_target} after {tries} tries \
         (rate k/n = {rate:.4}, GV rate 1 - H_q(d/n) = {gv_rate:.4})"
    )]
    VarshamovExhausted {
        d_target: usize,
        tries: usize,
        rate: f64,
        gv_rate: f64,
    },

    /// Budget constraint of a supplied adversary law is violated.
    #[error("distortion constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value: p,
            range: "[0, 1]",
        })
    }
}
