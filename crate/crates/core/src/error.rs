use thiserror::Error;

/// Errors raised by the numerical routines. The variant names double as the
/// error names printed by the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("PoleError: {0}")]
    Pole(String),
    #[error("TruncationError: {0}")]
    Truncation(String),
    #[error("DomainError: {0}")]
    Domain(String),
    #[error("MismatchError: {0}")]
    Mismatch(String),
    #[error("NotInvertibleError: {0}")]
    NotInvertible(String),
    #[error("RadiusError: {0}")]
    Radius(String),
    #[error("InsufficientDataError: {0}")]
    InsufficientData(String),
    #[error("TypeGrowthError: {0}")]
    TypeGrowth(String),
    #[error("NoRadiusError: {0}")]
    NoRadius(String),
    #[error("InvalidContext: {0}")]
    InvalidContext(String),
}

impl QError {
    /// Short error name, e.g. `"PoleError"`.
    pub fn name(&self) -> &'static str {
        match self {
            QError::Pole(_) => "PoleError",
            QError::Truncation(_) => "TruncationError",
            QError::Domain(_) => "DomainError",
            QError::Mismatch(_) => "MismatchError",
            QError::NotInvertible(_) => "NotInvertibleError",
            QError::Radius(_) => "RadiusError",
            QError::InsufficientData(_) => "InsufficientDataError",
            QError::TypeGrowth(_) => "TypeGrowthError",
            QError::NoRadius(_) => "NoRadiusError",
            QError::InvalidContext(_) => "InvalidContext",
        }
    }
}

pub type Result<T> = std::result::Result<T, QError>;
