use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid input: {0}")]
    Schema(String),

    #[error(transparent)]
    Core(#[from] flataff::Error),

    #[error("unknown example {name:?}; available: {}", available.join(", "))]
    UnknownExample { name: String, available: Vec<String> },

    #[error("{command} does not accept {kind} input")]
    WrongKind { command: String, kind: String },

    #[error("{command} needs an input (--example, --input or --json)")]
    MissingInput { command: String },

    #[error("built-in example {name} failed its self-test: {detail}")]
    SelfTest { name: String, detail: String },
}
