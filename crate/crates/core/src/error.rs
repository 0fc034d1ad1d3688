use thiserror::Error;

use crate::engine::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("level {level} is not a grid level of attribute `{attribute}`")]
    OffGrid { attribute: String, level: f64 },

    #[error("level {level} lies outside [{min}, {max}] for attribute `{attribute}`")]
    OutOfRange {
        attribute: String,
        level: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid attribute space: {0}")]
    InvalidSpace(String),

    #[error("domain sets belong to different attribute spaces")]
    SpaceMismatch,

    #[error("invalid utility curve: {0}")]
    InvalidCurve(String),

    #[error("invalid utility model: {}", format_diagnostics(.0))]
    InvalidModel(Vec<Diagnostic>),

    #[error("malformed utility model: {0}")]
    MalformedModel(String),

    #[error("undefined conditional: conditioning expression has utility {0}")]
    UndefinedConditional(f64),

    #[error("expression has {0} literals; at most {max} are allowed per query", max = crate::engine::MAX_LITERALS)]
    TooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] crate::syntax::ParseDiagnostic),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
