use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier mismatch in {op}: `{left}` vs `{right}`")]
    CarrierMismatch {
        op: &'static str,
        left: String,
        right: String,
    },

    #[error("carrier `{0}` is not a pair carrier")]
    NotPairCarrier(String),

    #[error("value `{value}` is not an element of carrier `{carrier}`")]
    NotAnElement { value: String, carrier: String },

    #[error("duplicate element `{value}` in carrier `{carrier}`")]
    DuplicateElement { value: String, carrier: String },

    #[error("relation {0} is not a function")]
    NotAFunction(String),

    #[error("resource bound exceeded: {what} needs {needed}, limit is {limit}")]
    ResourceExceeded {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("at {path}: {msg}")]
    Query { path: String, msg: String },

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("invalid scope: {0}")]
    InvalidScope(String),

    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
