//! Positioned, coded diagnostics shared by the parser, checker and CLI.

use std::fmt;

use serde::{Deserialize, Serialize};

/// The closed set of diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Code {
    #[serde(rename = "E-PARSE")]
    Parse,
    #[serde(rename = "E-UNBOUND")]
    Unbound,
    #[serde(rename = "E-MODALITY")]
    Modality,
    #[serde(rename = "E-2CELL-BOUNDARY")]
    TwoCellBoundary,
    #[serde(rename = "E-CONV")]
    Conv,
    #[serde(rename = "E-UNIVERSE")]
    Universe,
    #[serde(rename = "E-LATTICE-SIZE")]
    LatticeSize,
}

impl Code {
    pub const ALL: [Code; 7] = [
        Code::Parse,
        Code::Unbound,
        Code::Modality,
        Code::TwoCellBoundary,
        Code::Conv,
        Code::Universe,
        Code::LatticeSize,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::Parse => "E-PARSE",
            Code::Unbound => "E-UNBOUND",
            Code::Modality => "E-MODALITY",
            Code::TwoCellBoundary => "E-2CELL-BOUNDARY",
            Code::Conv => "E-CONV",
            Code::Universe => "E-UNIVERSE",
            Code::LatticeSize => "E-LATTICE-SIZE",
        }
    }

    pub fn parse(s: &str) -> Option<Code> {
        Code::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A half-open byte range into a source file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = match before.rfind('\n') {
        Some(nl) => before[nl + 1..].chars().count() + 1,
        None => before.chars().count() + 1,
    };
    (line, col)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
    pub code: Code,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actual: Option<String>,
}

impl Diagnostic {
    /// Orders by file, then offset, then code.
    pub fn sort_key(&self) -> (&str, usize, usize, Code) {
        (&self.file, self.start, self.end, self.code)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagnostics always serialize")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}: {}",
            self.file, self.line, self.column, self.code, self.message
        )?;
        if let (Some(e), Some(a)) = (&self.expected, &self.actual) {
            write!(f, "\n  expected: {e}\n  actual:   {a}")?;
        }
        Ok(())
    }
}

/// A diagnostic before it is attached to a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub span: Span,
    pub code: Code,
    pub message: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl Report {
    pub fn new(code: Code, span: Span, message: impl Into<String>) -> Self {
        Report {
            span,
            code,
            message: message.into(),
            expected: None,
            actual: None,
        }
    }

    pub fn with_pair(mut self, expected: String, actual: String) -> Self {
        self.expected = Some(expected);
        self.actual = Some(actual);
        self
    }

    pub fn into_diagnostic(self, file: &str, src: &str) -> Diagnostic {
        let (line, column) = line_col(src, self.span.start);
        Diagnostic {
            file: file.to_string(),
            start: self.span.start,
            end: self.span.end,
            line,
            column,
            code: self.code,
            message: self.message,
            expected: self.expected,
            actual: self.actual,
        }
    }
}

/// Sorts diagnostics into their canonical output order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}
