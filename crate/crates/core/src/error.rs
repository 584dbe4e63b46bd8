use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid edge ({0}, {1}): {2}")]
    InvalidEdge(usize, usize, &'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("eigensolver did not converge after {iterations} iterations (dim {dim})")]
    EigenFailure { dim: usize, iterations: usize },

    #[error("spectrum containment violated: {unmatched} old eigenvalue(s) have no partner in the lifted spectrum (first: {first})")]
    SpectrumContainmentViolated { unmatched: usize, first: f64 },

    #[error("vertex {0} has degree zero; the lifted Laplacian decomposition needs positive degrees")]
    DegreeZeroUnsupported(usize),

    #[error("row {row} of the transition matrix sums to {sum}")]
    NotStochastic { row: usize, sum: f64 },

    #[error("detailed balance fails at ({i}, {j}): gap {gap:e}")]
    NotReversible { i: usize, j: usize, gap: f64 },

    #[error("stationary measure invalid: {0}")]
    InvalidStationary(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for failures of the numerical machinery itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure { .. } | Error::SpectrumContainmentViolated { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
