use crate::element::ElementId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("element {0} is not in the ground set of this view")]
    Domain(ElementId),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("element {0} is not spanned, so it closes no circuit")]
    NoCircuit(ElementId),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{what}: size {size} exceeds limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("unsupported kind: expected {expected}, found {found}")]
    Kind {
        expected: &'static str,
        found: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn is_size_limit(&self) -> bool {
        matches!(self, Error::SizeLimit { .. })
    }
}
