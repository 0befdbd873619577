use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("EmptyFamily: no entry with positive rate and non-trivial map")]
    EmptyFamily,
    #[error("NegativeRate: rate {0} is negative or not finite")]
    NegativeRate(f64),
    #[error("InvalidDist: {0}")]
    InvalidDist(String),
    #[error("InvalidMap: {0}")]
    InvalidMap(String),
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("ArityOverflow: enumeration of {size} inputs exceeds cap {cap}")]
    ArityOverflow { size: u128, cap: u128 },
    #[error("EnumerationCap: {0}")]
    EnumerationCap(String),
    #[error("StepTooLarge: intermediate state left the simplex by {0:e}")]
    StepTooLarge(f64),
    #[error("NotConverged: {0}")]
    NotConverged(String),
    #[error("BudgetExceeded: more than {0} tree nodes sampled")]
    BudgetExceeded(usize),
    #[error("Unsupported: {0}")]
    Unsupported(String),
    #[error("Config: {0}")]
    Config(String),
    #[error("Io: {0}")]
    Io(String),
}

impl Error {
    /// Short variant name, as printed by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptyFamily => "EmptyFamily",
            Error::NegativeRate(_) => "NegativeRate",
            Error::InvalidDist(_) => "InvalidDist",
            Error::InvalidMap(_) => "InvalidMap",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::ArityOverflow { .. } => "ArityOverflow",
            Error::EnumerationCap(_) => "EnumerationCap",
            Error::StepTooLarge(_) => "StepTooLarge",
            Error::NotConverged(_) => "NotConverged",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::Unsupported(_) => "Unsupported",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
