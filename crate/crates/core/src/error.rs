use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no numeric embedding available")]
    MissingEmbedding,
    #[error("group closure exceeds the order bound {0}")]
    OrderExceeded(usize),
    #[error("generator `{0}` does not have finite order")]
    NotFiniteOrder(String),
    #[error("average of traces is not an integer: {0}")]
    NonIntegralAverage(String),
    #[error("linear part has no eigenvalue 1")]
    NoFixedDirection,
    #[error("rotation orientation is ambiguous without an embedding")]
    AmbiguousOrientation,
    #[error("element is not in the Donnelly situation: {0}")]
    NotDonnellySituation(String),
    #[error("unsupported element `{0}`: no certificate and no closed form")]
    UnsupportedElement(String),
    #[error("no rational with denominator at most {max_den} within {window:e} of {value}")]
    ReconstructionFailed { value: f64, max_den: i64, window: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("not an involution")]
    NotInvolution,
    #[error("not a Lagrangian pair: {0}")]
    NotLagrangianPair(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    ParseError { line: usize, col: usize, msg: String },
    #[error("validation error: {0}")]
    ValidationError(String),
    #[error("hypothesis insufficient: {0}")]
    HypothesisInsufficient(String),
    #[error("3 eta(B) - 24 eta(D) is not an integer: {0}")]
    NonIntegralNu(String),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable name of the variant, for structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingEmbedding => "MissingEmbedding",
            Error::OrderExceeded(_) => "OrderExceeded",
            Error::NotFiniteOrder(_) => "NotFiniteOrder",
            Error::NonIntegralAverage(_) => "NonIntegralAverage",
            Error::NoFixedDirection => "NoFixedDirection",
            Error::AmbiguousOrientation => "AmbiguousOrientation",
            Error::NotDonnellySituation(_) => "NotDonnellySituation",
            Error::UnsupportedElement(_) => "UnsupportedElement",
            Error::ReconstructionFailed { .. } => "ReconstructionFailed",
            Error::ZeroVector => "ZeroVector",
            Error::NotInvolution => "NotInvolution",
            Error::NotLagrangianPair(_) => "NotLagrangianPair",
            Error::ParseError { .. } => "ParseError",
            Error::ValidationError(_) => "ValidationError",
            Error::HypothesisInsufficient(_) => "HypothesisInsufficient",
            Error::NonIntegralNu(_) => "NonIntegralNu",
            Error::UnknownBuiltin(_) => "UnknownBuiltin",
        }
    }
}
