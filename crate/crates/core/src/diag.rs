use std::fmt;

use crate::lexer::LexError;
use crate::parser::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiagCode {
    UnterminatedString,
    IllegalCharacter,
    MalformedDirective,
    LiteralOutOfRange,
    ParseError,
    UseBeforeDecl,
    UseBeforeDef,
    TypeMismatch,
    UnknownDirective,
    NotIndexable,
    ArityMismatch,
    Redeclaration,
    ShadowsBuiltin,
    InvalidRange,
    NotAStatement,
    TruncatingConversion,
    NameMismatch,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::UnterminatedString => "UnterminatedString",
            DiagCode::IllegalCharacter => "IllegalCharacter",
            DiagCode::MalformedDirective => "MalformedDirective",
            DiagCode::LiteralOutOfRange => "LiteralOutOfRange",
            DiagCode::ParseError => "ParseError",
            DiagCode::UseBeforeDecl => "UseBeforeDecl",
            DiagCode::UseBeforeDef => "UseBeforeDef",
            DiagCode::TypeMismatch => "TypeMismatch",
            DiagCode::UnknownDirective => "UnknownDirective",
            DiagCode::NotIndexable => "NotIndexable",
            DiagCode::ArityMismatch => "ArityMismatch",
            DiagCode::Redeclaration => "Redeclaration",
            DiagCode::ShadowsBuiltin => "ShadowsBuiltin",
            DiagCode::InvalidRange => "InvalidRange",
            DiagCode::NotAStatement => "NotAStatement",
            DiagCode::TruncatingConversion => "TruncatingConversion",
            DiagCode::NameMismatch => "NameMismatch",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub message: String,
    pub line: u32,
    pub col: u32,
}

impl Diagnostic {
    pub fn error(code: DiagCode, line: u32, col: u32, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, code, message: message.into(), line, col }
    }

    pub fn warning(code: DiagCode, line: u32, col: u32, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, code, message: message.into(), line, col }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: severity: code: message`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{file}:{}:{}: {}: {}: {}",
            self.line, self.col, self.severity, self.code, self.message
        )
    }
}

impl From<&LexError> for Diagnostic {
    fn from(e: &LexError) -> Self {
        let (line, col) = e.position();
        let code = match e {
            LexError::UnterminatedString { .. } => DiagCode::UnterminatedString,
            LexError::IllegalCharacter { .. } => DiagCode::IllegalCharacter,
            LexError::MalformedDirective { .. } => DiagCode::MalformedDirective,
            LexError::LiteralOutOfRange { .. } => DiagCode::LiteralOutOfRange,
        };
        let full = e.to_string();
        let message = full.splitn(3, ':').nth(2).unwrap_or(&full).trim().to_string();
        Diagnostic::error(code, line, col, message)
    }
}

impl From<&ParseError> for Diagnostic {
    fn from(e: &ParseError) -> Self {
        Diagnostic::error(
            DiagCode::ParseError,
            e.line,
            e.col,
            format!("expected {}, found {}", e.expected.join(" or "), e.found),
        )
    }
}

/// Sorts by position, keeping discovery order for ties.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by_key(|d| (d.line, d.col));
}

pub fn render_all(diags: &[Diagnostic], file: &str) -> String {
    diags.iter().map(|d| d.render(file) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_format() {
        let d = Diagnostic::error(DiagCode::UseBeforeDecl, 3, 5, "`b` is not declared");
        assert_eq!(d.render("f.tm"), "f.tm:3:5: error: UseBeforeDecl: `b` is not declared");
    }

    #[test]
    fn lex_error_conversion_strips_position() {
        let e = LexError::IllegalCharacter { ch: '@', line: 2, col: 4 };
        let d = Diagnostic::from(&e);
        assert_eq!(d.render("x.tm"), "x.tm:2:4: error: IllegalCharacter: illegal character '@'");
    }
}
