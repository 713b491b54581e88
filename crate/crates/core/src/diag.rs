use std::fmt;

use serde::{Deserialize, Serialize};

/// Diagnostic and error codes shared by every operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    // model structure
    DuplicateId,
    BadNumbering,
    DanglingDependency,
    DependencyCycle,
    UnknownArea,
    EmptyValues,
    SelfDependency,
    // documents
    Syntax,
    Schema,
    InvalidModel,
    UnknownId,
    // customization
    PinConflict,
    AlternativeConflict,
    MismatchedModel,
    SpaceTooLarge,
    IncompleteConfiguration,
    // configuration checks
    AreaViolation,
    AlternativeViolation,
    OrViolation,
    DependencyViolation,
    MandatoryViolation,
    // traces
    DanglingTrace,
    UntaggedVariantElement,
}

impl Code {
    pub fn token(self) -> &'static str {
        match self {
            Code::DuplicateId => "DUPLICATE_ID",
            Code::BadNumbering => "BAD_NUMBERING",
            Code::DanglingDependency => "DANGLING_DEPENDENCY",
            Code::DependencyCycle => "DEPENDENCY_CYCLE",
            Code::UnknownArea => "UNKNOWN_AREA",
            Code::EmptyValues => "EMPTY_VALUES",
            Code::SelfDependency => "SELF_DEPENDENCY",
            Code::Syntax => "SYNTAX",
            Code::Schema => "SCHEMA",
            Code::InvalidModel => "INVALID_MODEL",
            Code::UnknownId => "UNKNOWN_ID",
            Code::PinConflict => "PIN_CONFLICT",
            Code::AlternativeConflict => "ALTERNATIVE_CONFLICT",
            Code::MismatchedModel => "MISMATCHED_MODEL",
            Code::SpaceTooLarge => "SPACE_TOO_LARGE",
            Code::IncompleteConfiguration => "INCOMPLETE_CONFIGURATION",
            Code::AreaViolation => "AREA_VIOLATION",
            Code::AlternativeViolation => "ALTERNATIVE_VIOLATION",
            Code::OrViolation => "OR_VIOLATION",
            Code::DependencyViolation => "DEPENDENCY_VIOLATION",
            Code::MandatoryViolation => "MANDATORY_VIOLATION",
            Code::DanglingTrace => "DANGLING_TRACE",
            Code::UntaggedVariantElement => "UNTAGGED_VARIANT_ELEMENT",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One finding: a code, the id or location it concerns, and a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub subject: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, subject: impl ToString, message: impl Into<String>) -> Self {
        Self {
            code,
            subject: subject.to_string(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.subject.is_empty() {
            write!(f, "{}: {}", self.code, self.message)
        } else {
            write!(f, "{} {}: {}", self.code, self.subject, self.message)
        }
    }
}
