use crate::diag::{Code, Diagnostic};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("malformed XML: {0}")]
    Syntax(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid model ({} diagnostics)", .0.len())]
    InvalidModel(Vec<Diagnostic>),
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("area `{0}` is not declared by the model")]
    UnknownArea(String),
    #[error("{demanded} is required by {by} but is not available")]
    PinConflict { demanded: String, by: String },
    #[error("alternative variant {variant} would need both {first} and {second}")]
    AlternativeConflict {
        variant: String,
        first: String,
        second: String,
    },
    #[error("decision table does not cover variant {0}")]
    MismatchedModel(String),
    #[error("state space of {space} configurations exceeds the cap of {cap}")]
    SpaceTooLarge { space: u128, cap: u128 },
    #[error("configuration leaves {} undecided", .0.join(", "))]
    IncompleteConfiguration(Vec<String>),
    #[error("document has trace problems ({} diagnostics)", .0.len())]
    DanglingTrace(Vec<Diagnostic>),
}

impl Error {
    pub fn code(&self) -> Code {
        match self {
            Error::Syntax(_) => Code::Syntax,
            Error::Schema(_) => Code::Schema,
            Error::InvalidModel(_) => Code::InvalidModel,
            Error::UnknownId(_) => Code::UnknownId,
            Error::UnknownArea(_) => Code::UnknownArea,
            Error::PinConflict { .. } => Code::PinConflict,
            Error::AlternativeConflict { .. } => Code::AlternativeConflict,
            Error::MismatchedModel(_) => Code::MismatchedModel,
            Error::SpaceTooLarge { .. } => Code::SpaceTooLarge,
            Error::IncompleteConfiguration(_) => Code::IncompleteConfiguration,
            Error::DanglingTrace(_) => Code::DanglingTrace,
        }
    }

    /// The error flattened into diagnostics. Errors that wrap a diagnostic
    /// list return that list unchanged.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            Error::InvalidModel(d) | Error::DanglingTrace(d) => d.clone(),
            Error::UnknownId(id) => vec![Diagnostic::new(self.code(), id, self.to_string())],
            Error::UnknownArea(a) => vec![Diagnostic::new(self.code(), a, self.to_string())],
            Error::PinConflict { demanded, .. } => {
                vec![Diagnostic::new(self.code(), demanded, self.to_string())]
            }
            Error::AlternativeConflict { variant, .. } => {
                vec![Diagnostic::new(self.code(), variant, self.to_string())]
            }
            Error::MismatchedModel(v) => vec![Diagnostic::new(self.code(), v, self.to_string())],
            _ => vec![Diagnostic::new(self.code(), "", self.to_string())],
        }
    }
}
