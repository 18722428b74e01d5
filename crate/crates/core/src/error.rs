use thiserror::Error;

/// Errors raised by the solvers, generators and the experiment harness.
#[derive(Debug, Error)]
pub enum OcoError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("inner solver did not converge after {iters} iterations (residual {residual:e})")]
    Convergence { iters: usize, residual: f64 },

    #[error("round {round}: {source}")]
    AtRound {
        round: usize,
        #[source]
        source: Box<OcoError>,
    },

    #[error("{cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<OcoError>,
    },

    #[error("unsupported problem: {0}")]
    Unsupported(String),

    #[error("problem appears infeasible: {0}")]
    Infeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl OcoError {
    pub(crate) fn at_round(self, round: usize) -> Self {
        match self {
            e @ OcoError::AtRound { .. } => e,
            e => OcoError::AtRound {
                round,
                source: Box::new(e),
            },
        }
    }

    pub(crate) fn in_cell(self, cell: impl Into<String>) -> Self {
        OcoError::Cell {
            cell: cell.into(),
            source: Box::new(self),
        }
    }

    /// True for failures that come from the numerics rather than from bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            OcoError::Numeric(_)
            | OcoError::Convergence { .. }
            | OcoError::Infeasible(_) => true,
            OcoError::AtRound { source, .. } | OcoError::Cell { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, OcoError>;
