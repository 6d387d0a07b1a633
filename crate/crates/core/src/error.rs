use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("word {0:?} is not of zeta shape (must be nonempty and end in y)")]
    WordNotOfZetaShape(String),

    #[error("not admissible: {0}")]
    NotAdmissible(String),

    #[error("weight {0} is too small (need at least 2)")]
    WeightTooSmall(usize),

    #[error("size out of range: {0}")]
    SizeOutOfRange(String),

    #[error("outside supported envelope: {0}")]
    EnvelopeExceeded(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("divergent integrand: {0}")]
    DivergentIntegrand(String),

    #[error("dimension {0} is too large")]
    DimensionTooLarge(usize),

    #[error("expansion order {0} is too large")]
    OrderTooLarge(usize),

    #[error("parameters outside the convergence region: {0}")]
    OutsideConvergenceRegion(String),

    #[error("degree {0} is too large")]
    DegreeTooLarge(usize),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse { position, message: message.into() }
    }

    /// Stable name of the variant, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "ParseError",
            Error::WordNotOfZetaShape(_) => "WordNotOfZetaShape",
            Error::NotAdmissible(_) => "NonAdmissible",
            Error::WeightTooSmall(_) => "WeightTooSmall",
            Error::SizeOutOfRange(_) => "SizeOutOfRange",
            Error::EnvelopeExceeded(_) => "EnvelopeExceeded",
            Error::DomainError(_) => "DomainError",
            Error::DivergentIntegrand(_) => "DivergentIntegrand",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::OrderTooLarge(_) => "OrderTooLarge",
            Error::OutsideConvergenceRegion(_) => "OutsideConvergenceRegion",
            Error::DegreeTooLarge(_) => "DegreeTooLarge",
            Error::InsufficientPrecision(_) => "InsufficientPrecision",
            Error::InvalidGraph(_) => "InvalidGraph",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// Input errors (bad text, bad arguments) as opposed to computational failures.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::InvalidArgument(_) | Error::InvalidGraph(_))
    }
}
