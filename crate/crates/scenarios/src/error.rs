use thiserror::Error;

pub type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// A scenario field failed to parse or validate. `field` is a path such
    /// as `components[1]` or `sample.box`.
    #[error("{field}: {message}")]
    Schema { field: String, message: String },

    #[error("unknown built-in `{0}` (see `pbh builtin list`)")]
    UnknownBuiltin(String),

    #[error("built-in `{name}`: {message}")]
    BuiltinParams { name: String, message: String },

    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("singularity in check `{check}` at {point:?}: {message}")]
    Singularity {
        check: String,
        point: Vec<f64>,
        message: String,
    },

    #[error("report output failed: {0}")]
    Output(String),

    #[error(transparent)]
    Core(#[from] pbh_core::Error),
}

impl ScenarioError {
    pub fn schema(field: impl Into<String>, message: impl std::fmt::Display) -> ScenarioError {
        ScenarioError::Schema {
            field: field.into(),
            message: message.to_string(),
        }
    }

    /// Process exit status for this error: 3 for a singularity, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Singularity { .. } => 3,
            _ => 2,
        }
    }
}
