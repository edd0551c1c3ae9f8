use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("malformed embedding: {0}")]
    MalformedEmbedding(String),

    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("structure is not a member of {class}: {reason}")]
    NotMember { class: String, reason: String },

    #[error("inadmissible linear order: {0}")]
    InadmissibleOrder(String),

    #[error("invalid class specification: {0}")]
    InvalidClass(String),

    #[error("bound {requested} exceeds the hard cap {cap} for {what}")]
    BoundTooLarge {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inconsistent partial map: {0}")]
    InconsistentMap(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("document error: {0}")]
    Document(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Document(e.to_string())
    }
}
