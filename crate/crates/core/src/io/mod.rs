//! Text formats in and out of the toolkit, and the JSON report envelope.
//!
//! Every parser is total: any input yields a value or a [`ParseDiagnostic`]
//! carrying a 1-based line and column. Numbers are written with 17
//! significant digits so `f64` values survive a round trip bit-exactly.

mod basis;
mod grid;
mod json;
mod report;
mod structure;

pub use basis::{parse_basis, write_basis};
pub use grid::{parse_chgcar, parse_grid, parse_simple_grid, write_chgcar, write_simple_grid, ChgcarFormat, GridFile, GridFormat, GridFormats, SimpleGridFormat};
pub use json::{
    parse_json, parse_ledger, parse_levels, parse_reaction_input, parse_spinsites, parse_transitions, LevelsInput,
    ReactionInput, TransitionsInput,
};
pub use report::{fingerprint_bytes, ReportEnvelope};
pub use structure::{parse_poscar, parse_structure, parse_xyz, parse_xyz_atoms, write_poscar, write_xyz, write_xyz_atoms, Poscar, StructureFormat, StructureFormats, Xyz};

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// A located parse failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
    /// JSON pointer of the offending value, for JSON inputs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointer: Option<String>,
}

impl ParseDiagnostic {
    pub fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic { line, column, severity: Severity::Error, message: message.into(), pointer: None }
    }

    pub fn with_pointer(mut self, pointer: impl Into<String>) -> Self {
        self.pointer = Some(pointer.into());
        self
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "line {}, column {}: {}: {}", self.line, self.column, sev, self.message)?;
        if let Some(p) = &self.pointer {
            write!(f, " (at {p})")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseDiagnostic {}

pub type ParseResult<T> = Result<T, ParseDiagnostic>;

/// UTF-8 decoding with the location of the first invalid byte.
pub fn decode(bytes: &[u8]) -> ParseResult<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let ok = &bytes[..e.valid_up_to()];
        let line = ok.iter().filter(|&&b| b == b'\n').count() + 1;
        let start = ok.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&ok[start..]).chars().count() + 1;
        ParseDiagnostic::error(line, column, "input is not valid UTF-8")
    })
}

/// 17 significant digits; round-trips any finite `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// 1-based (line, column) of a byte offset.
pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let start = before.rfind('\n').map_or(0, |p| p + 1);
    (line, before[start..].chars().count() + 1)
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

impl<'a> Token<'a> {
    pub fn err(&self, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic::error(self.line, self.column, message)
    }

    pub fn f64(&self) -> ParseResult<f64> {
        match self.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(self.err(format!("non-finite number '{}'", self.text))),
            Err(_) => Err(self.err(format!("malformed number '{}'", self.text))),
        }
    }

    pub fn usize(&self) -> ParseResult<usize> {
        self.text.parse::<usize>().map_err(|_| self.err(format!("expected a non-negative integer, found '{}'", self.text)))
    }
}

pub(crate) fn tokens(line: &str, line_no: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut col = 0;
    let mut start: Option<(usize, usize)> = None;
    for (byte, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push(Token { text: &line[b..byte], line: line_no, column: c });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        out.push(Token { text: &line[b..], line: line_no, column: c });
    }
    out
}

/// Line-oriented reader over a text document.
pub(crate) struct Lines<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Lines { lines: text.lines().collect(), pos: 0 }
    }

    /// Number of the line that `next` would return.
    pub fn line_no(&self) -> usize {
        self.pos + 1
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.lines.len()
    }

    pub fn next(&mut self, what: &str) -> ParseResult<(usize, &'a str)> {
        match self.lines.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok((self.pos, l))
            }
            None => Err(ParseDiagnostic::error(self.pos + 1, 1, format!("unexpected end of input: expected {what}"))),
        }
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).copied()
    }

    pub fn next_tokens(&mut self, what: &str) -> ParseResult<(usize, Vec<Token<'a>>)> {
        let (n, l) = self.next(what)?;
        Ok((n, tokens(l, n)))
    }

    /// Exactly `k` leading floats from the next line; extra tokens ignored.
    pub fn floats(&mut self, k: usize, what: &str) -> ParseResult<Vec<f64>> {
        let (n, toks) = self.next_tokens(what)?;
        if toks.len() < k {
            let col = toks.last().map_or(1, |t| t.column + t.text.chars().count());
            return Err(ParseDiagnostic::error(n, col, format!("expected {k} numbers for {what}, found {}", toks.len())));
        }
        toks[..k].iter().map(|t| t.f64()).collect()
    }

    /// Read `count` whitespace-separated floats spanning any number of lines.
    pub fn float_block(&mut self, count: usize, what: &str) -> ParseResult<Vec<f64>> {
        let mut out = Vec::new();
        while out.len() < count {
            let line = self.line_no();
            let (_, toks) = self.next_tokens(what).map_err(|_| {
                ParseDiagnostic::error(line, 1, format!("{what}: expected {count} values, found {}", out.len()))
            })?;
            for t in toks {
                if out.len() == count {
                    return Err(t.err(format!("{what}: unexpected extra value on the last line")));
                }
                out.push(t.f64()?);
            }
        }
        Ok(out)
    }
}
