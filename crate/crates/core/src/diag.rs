use std::fmt;

use serde::Serialize;

use crate::frontend::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Stable diagnostic codes. The string form is part of the CLI output contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Code {
    #[serde(rename = "UNTERMINATED")]
    Unterminated,
    #[serde(rename = "PARSE_ERROR")]
    ParseError,
    #[serde(rename = "UNSUPPORTED_SYNTAX")]
    UnsupportedSyntax,
    #[serde(rename = "IO_ERROR")]
    IoError,
    #[serde(rename = "UNKNOWN_COMPONENT")]
    UnknownComponent,
    #[serde(rename = "CAPTURE_UNSUPPORTED")]
    CaptureUnsupported,
    #[serde(rename = "LOWERING_ERROR")]
    LoweringError,
    #[serde(rename = "MAYBE_UNDEFINED")]
    MaybeUndefined,
    #[serde(rename = "IMPLICIT_ANY")]
    ImplicitAny,
    #[serde(rename = "NO_ANY")]
    NoAny,
    #[serde(rename = "NO_LAYOUT_CHANGE")]
    NoLayoutChange,
    #[serde(rename = "OPERATOR_SEMANTICS")]
    OperatorSemantics,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Unterminated => "UNTERMINATED",
            Code::ParseError => "PARSE_ERROR",
            Code::UnsupportedSyntax => "UNSUPPORTED_SYNTAX",
            Code::IoError => "IO_ERROR",
            Code::UnknownComponent => "UNKNOWN_COMPONENT",
            Code::CaptureUnsupported => "CAPTURE_UNSUPPORTED",
            Code::LoweringError => "LOWERING_ERROR",
            Code::MaybeUndefined => "MAYBE_UNDEFINED",
            Code::ImplicitAny => "IMPLICIT_ANY",
            Code::NoAny => "NO_ANY",
            Code::NoLayoutChange => "NO_LAYOUT_CHANGE",
            Code::OperatorSemantics => "OPERATOR_SEMANTICS",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub severity: Severity,
    pub code: Code,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn error(path: impl Into<String>, code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { path: path.into(), severity: Severity::Error, code, span, message: message.into() }
    }

    pub fn warning(path: impl Into<String>, code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { path: path.into(), severity: Severity::Warning, code, span, message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    fn sort_key(&self) -> (&str, u32, u32, Code, &str) {
        (&self.path, self.span.line, self.span.col, self.code, &self.message)
    }
}

/// `path:line:col: severity[code]: message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}[{}]: {}",
            self.path, self.span.line, self.span.col, self.severity, self.code, self.message
        )
    }
}

/// Sorts diagnostics into report order and drops exact duplicates.
pub fn sort_diagnostics(diags: &mut Vec<Diagnostic>) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    diags.dedup();
}
