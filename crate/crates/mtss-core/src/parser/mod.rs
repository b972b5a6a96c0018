//! Serialization of scripts to and from the canonical `.mtss.json`
//! document format, plus the inline-timestamp micro-grammar inside
//! descriptions, with located parse diagnostics.
//!
//! The concrete syntax is a constrained JSON dialect: a closed schema
//! (unknown fields are errors), fixed field order on output, 2-space
//! indentation, and times printed with exactly 3 decimal places. See
//! [`serialize`] for the emission contract and [`parse_document`] for
//! the diagnostic catalog.

mod document;
pub(crate) mod emit;
pub(crate) mod json;
mod markers;

use std::fmt;

pub use emit::serialize;
pub use markers::{
    extract_inline_timestamps, reinsert_markers, strip_markers_lossy, InlineTimestamp, MarkerError,
};

pub(crate) use document::{parse_event_record, parse_reference_record};

use crate::schema::Script;

/// Byte- and line-level location of a construct in the source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub byte_offset_start: usize,
    pub byte_offset_end: usize,
    /// 1-based line of the start offset.
    pub line: u32,
    /// 1-based column (in characters) of the start offset.
    pub column: u32,
}

impl SourceSpan {
    pub const ZERO: SourceSpan = SourceSpan {
        byte_offset_start: 0,
        byte_offset_end: 0,
        line: 1,
        column: 1,
    };
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Fixed catalog of parse-error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParseCode {
    /// Malformed syntax (including invalid UTF-8).
    P001,
    /// Unknown or duplicate field in the closed schema.
    P002,
    /// Wrong value type for a field.
    P003,
    /// Schema-invariant violation (wraps a structure error with a span).
    P004,
    /// Bad inline timestamp marker.
    P005,
}

impl ParseCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseCode::P001 => "P001",
            ParseCode::P002 => "P002",
            ParseCode::P003 => "P003",
            ParseCode::P004 => "P004",
            ParseCode::P005 => "P005",
        }
    }
}

impl fmt::Display for ParseCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A located parse finding.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseDiagnostic {
    pub code: ParseCode,
    pub message: String,
    pub span: SourceSpan,
}

impl ParseDiagnostic {
    /// One-line machine form: `code<TAB>severity<TAB>line:col<TAB>message`.
    pub fn machine_line(&self) -> String {
        format!("{}\terror\t{}\t{}", self.code, self.span, self.message)
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}] {}: {}", self.code, self.span, self.message)
    }
}

/// Parse a byte sequence claimed to be a UTF-8 document.
///
/// On success the script is structurally valid (schema invariants hold);
/// relational lint is *not* run. On failure at least one located
/// diagnostic is returned; never both.
pub fn parse_document(input: &[u8]) -> Result<Script, Vec<ParseDiagnostic>> {
    match std::str::from_utf8(input) {
        Ok(text) => parse_str(text),
        Err(e) => {
            let valid = e.valid_up_to();
            let prefix = &input[..valid];
            let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count() as u32;
            let line_start = prefix
                .iter()
                .rposition(|&b| b == b'\n')
                .map(|p| p + 1)
                .unwrap_or(0);
            let column = 1 + std::str::from_utf8(&prefix[line_start..])
                .map(|s| s.chars().count())
                .unwrap_or(0) as u32;
            Err(vec![ParseDiagnostic {
                code: ParseCode::P001,
                message: format!("invalid UTF-8 at byte {valid}"),
                span: SourceSpan {
                    byte_offset_start: valid,
                    byte_offset_end: (valid + 1).min(input.len()),
                    line,
                    column,
                },
            }])
        }
    }
}

/// Parse a UTF-8 document string. See [`parse_document`].
pub fn parse_str(text: &str) -> Result<Script, Vec<ParseDiagnostic>> {
    let root = json::parse_value(text).map_err(|d| vec![d])?;
    document::map_document(&root)
}
