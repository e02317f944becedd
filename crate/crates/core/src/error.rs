use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdentifier { name: String, pos: usize },

    #[error("function `{func}` expects {expected} argument(s), found {found} (position {pos})")]
    Arity {
        func: String,
        expected: usize,
        found: usize,
        pos: usize,
    },

    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("singularity: {what} at {point:?}")]
    Singularity { what: String, point: Vec<f64> },

    #[error("immersion is rank deficient at {point:?}")]
    RankDeficient { point: Vec<f64> },

    #[error("jet order {needed} required, configured maximum is {max}")]
    JetOrder { needed: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{source} (at {point:?})")]
    AtPoint {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches the evaluation point to an error, unless it already carries one.
    pub fn at(self, point: &[f64]) -> Error {
        match self {
            e @ (Error::AtPoint { .. }
            | Error::Singularity { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::RankDeficient { .. }) => e,
            e => Error::AtPoint {
                point: point.to_vec(),
                source: Box::new(e),
            },
        }
    }

    /// True for errors caused by evaluating at a singular or excluded point.
    pub fn is_singularity(&self) -> bool {
        match self {
            Error::Singularity { .. } | Error::Domain(_) | Error::SingularMatrix => true,
            Error::AtPoint { source, .. } => source.is_singularity(),
            _ => false,
        }
    }
}
