use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Format(String),
    #[error("unsupported or missing format version: expected {expected}, found {found:?}")]
    Version {
        expected: &'static str,
        found: Option<String>,
    },
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("invalid site for {kind}: {reason}")]
    InvalidSite { kind: String, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("chain is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("generator does not belong to this diagram: {0}")]
    ForeignGenerator(String),
    #[error("feasibility bound exceeded: {0}")]
    Infeasible(String),
    #[error("tower is not eventually periodic: {0}")]
    NotPeriodic(String),
    #[error("inconsistent tower: {0}")]
    InconsistentTower(String),
    #[error("bad certificate: {0}")]
    BadCertificate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn site(kind: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSite {
            kind: kind.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by exceeding configured size limits rather
    /// than by bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
