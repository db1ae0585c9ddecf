use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown facility `{0}`")]
    UnknownFacility(String),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("no feasible solution exists for this instance")]
    Infeasible,
    #[error("client `{0}` lies in no candidate ball")]
    UncoverableClient(String),
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("invariant `{check}` violated: {detail}")]
    Invariant { check: &'static str, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("oracle size guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invariant(check: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            check,
            detail: detail.into(),
        }
    }
}
