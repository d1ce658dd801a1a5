use std::fmt;

use serde::Serialize;

use crate::model::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes.
pub mod codes {
    /// Malformed source text.
    pub const SYNTAX: &str = "E001";
    /// Relational-stack target does not resolve.
    pub const UNRESOLVED_TARGET: &str = "E1";
    /// `PID` used against an archetype without a primary key.
    pub const PID_WITHOUT_PK: &str = "E2";
    /// Duplicate archetype, relationship, field, method or derived name.
    pub const DUPLICATE: &str = "E3";
    /// Primary key outside the database layer.
    pub const PK_NOT_IN_DATABASE: &str = "E4";
    /// Cardinality `m` in a binary relationship.
    pub const M_IN_BINARY: &str = "E5";
    /// Relationship end naming an unknown archetype.
    pub const UNKNOWN_END: &str = "E6";
    /// More than one primary key field.
    pub const MULTIPLE_PK: &str = "E7";
    /// Relational-stack source is not a database-side field of its archetype.
    pub const BAD_FK_SOURCE: &str = "E8";
    /// Relationship shape with no conversion rule.
    pub const UNSUPPORTED_SHAPE: &str = "E9";
    /// Relationship end cannot be converted (no key to reference, no table to
    /// hold the key, or a generated column collides with an existing one).
    pub const UNCONVERTIBLE_END: &str = "E10";

    /// Foreign key targets a field that is not the primary key.
    pub const FK_NOT_PK: &str = "W1";
    /// Database-side member without a database type.
    pub const MISSING_DB_TYPE: &str = "W2";
    /// Code-side member without a code type.
    pub const MISSING_CODE_TYPE: &str = "W3";
    /// Relationship or reference touching a draft archetype.
    pub const DRAFT_REFERENCED: &str = "W4";
    /// Member lifeline outside the layers its archetype kind spans.
    pub const KIND_MISMATCH: &str = "W5";
    /// Foreign key column type differs from the referenced column type.
    pub const FK_TYPE_MISMATCH: &str = "W6";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), span }
    }

    pub fn warning(code: &'static str, message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), span }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Sort key: file, line, column, then code.
    pub fn sort_key(&self) -> (usize, u32, u32, &'static str) {
        (self.span.file, self.span.line, self.span.column, self.code)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}] {}:{} {}", self.severity, self.code, self.span.line, self.span.column, self.message)
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
