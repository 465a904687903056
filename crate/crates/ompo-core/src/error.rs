use alloc::string::String;
use core::fmt;

/// Errors shared by all core modules.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Shapes of two arguments disagree.
    DimensionMismatch { expected: usize, got: usize, what: &'static str },
    /// A distribution fails its normalization/nonnegativity invariant.
    InvalidDistribution(String),
    /// A divergence is evaluated where the denominator has no support.
    SupportViolation,
    /// A value that must be finite is NaN or infinite.
    NonFinite(&'static str),
    /// A reward outside (0, r_max] was fed to a log-reward objective.
    NonPositiveReward(f64),
    /// A buffer that must hold data is empty.
    EmptyBuffer(&'static str),
    /// Squashed-policy log-density requested on the +-1 boundary.
    ActionOnBoundary,
    /// The occupancy linear system failed to factorize.
    SingularSystem,
    /// A configuration invariant is violated.
    InvalidConfig(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::DimensionMismatch { expected, got, what } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, got {got}")
            }
            CoreError::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            CoreError::SupportViolation => write!(f, "divergence undefined: q = 0 where p > 0"),
            CoreError::NonFinite(what) => write!(f, "non-finite value in {what}"),
            CoreError::NonPositiveReward(r) => write!(f, "reward must be strictly positive, got {r}"),
            CoreError::EmptyBuffer(which) => write!(f, "buffer {which} is empty"),
            CoreError::ActionOnBoundary => write!(f, "action component on the tanh boundary"),
            CoreError::SingularSystem => write!(f, "occupancy linear system is singular"),
            CoreError::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl core::error::Error for CoreError {}

pub type Result<T> = core::result::Result<T, CoreError>;
