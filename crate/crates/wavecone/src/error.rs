use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Which contract a failure falls under; drives CLI exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    /// Unreadable or malformed input.
    Parse,
    /// A mathematical precondition does not hold.
    Precondition,
    /// An experiment's hypothesis gate rejected the run.
    Gate,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] wavecone_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("multiplier is not finite at frequency {0:?}")]
    NonFiniteMultiplier(Vec<f64>),
    #[error(
        "fixed-point iteration diverged after {iterations} iterations (measured contraction {contraction:.4}); \
         the perturbation violates the smallness condition"
    )]
    Diverged { iterations: usize, contraction: f64 },
    #[error("no convergence within {iterations} iterations (last relative change {last_change:.3e}, contraction {contraction:.4})")]
    NotConverged { iterations: usize, last_change: f64, contraction: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("hypothesis gate: {0}")]
    Gate(String),
}

impl Error {
    pub fn parse(context: impl fmt::Display, message: impl fmt::Display) -> Self {
        Error::Parse { context: context.to_string(), message: message.to_string() }
    }

    pub fn category(&self) -> Category {
        use wavecone_core::Error as C;
        match self {
            Error::Io { .. } | Error::Parse { .. } => Category::Parse,
            Error::Core(C::ParseRational(_) | C::UnknownBuiltin(_) | C::InvalidBuiltin(_) | C::InvalidOperator(_)) => {
                Category::Parse
            }
            Error::Gate(_) => Category::Gate,
            _ => Category::Precondition,
        }
    }
}
