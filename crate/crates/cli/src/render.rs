//! Decimal rendering and the CSV tables the commands emit.
//!
//! A rendered number always parses back to a value whose rendering is the
//! same string, so emitted files are fixed points of parse-then-emit.

use std::fmt::{self, Write as _};

use crate::error::{CliError, Result};

pub const DEFAULT_PRECISION: usize = 17;
pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;

pub fn check_precision(p: usize) -> Result<usize> {
    if (MIN_PRECISION..=MAX_PRECISION).contains(&p) {
        Ok(p)
    } else {
        Err(CliError::config(
            "precision",
            format!("significant digits must be in {MIN_PRECISION}..={MAX_PRECISION}, got {p}"),
        ))
    }
}

fn significant_digits(v: f64) -> usize {
    let s = format!("{:e}", v.abs());
    let mantissa = s.split('e').next().unwrap_or("");
    mantissa.bytes().filter(u8::is_ascii_digit).count()
}

/// The value actually written for `v` at `precision` significant digits.
///
/// Values whose shortest round-trip form already fits are kept as they are;
/// others snap to the nearest double of their precision-digit rounding,
/// which in turn has a shortest form that fits.
pub fn quantize(v: f64, precision: usize) -> f64 {
    if !v.is_finite() || significant_digits(v) <= precision {
        return v;
    }
    format!("{:.*e}", precision - 1, v).parse().expect("rust float formatting parses back")
}

pub fn format_number(v: f64, precision: usize) -> String {
    let q = quantize(v, precision);
    let a = q.abs();
    if q == 0.0 || !q.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{q}")
    } else {
        format!("{q:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self, precision: usize, out: &mut String) {
        match self {
            Cell::Int(n) => write!(out, "{n}").unwrap(),
            Cell::Real(v) => out.push_str(&format_number(*v, precision)),
            Cell::Text(s) => out.push_str(s),
        }
    }

    fn parse(s: &str) -> Cell {
        if let Ok(n) = s.parse::<u64>() {
            Cell::Int(n)
        } else if let Ok(v) = s.parse::<f64>() {
            Cell::Real(v)
        } else {
            Cell::Text(s.to_string())
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Comma-separated table without quoting; no cell contains a comma.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, precision: usize) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, cell) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                cell.render(precision, &mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut lines = text.lines();
        let header: Vec<String> = lines.next().ok_or(ParseError::Empty)?.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let row: Vec<Cell> = line.split(',').map(Cell::parse).collect();
            if row.len() != header.len() {
                return Err(ParseError::Width { line: k + 2, expected: header.len(), found: row.len() });
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseError {
    Empty,
    Width { line: usize, expected: usize, found: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Empty => f.write_str("empty table"),
            ParseError::Width { line, expected, found } => {
                write!(f, "line {line}: expected {expected} fields, found {found}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// `key: value` report lines.
#[derive(Debug, Default, Clone)]
pub struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.lines.push((key.to_string(), value.into()));
    }

    pub fn render(&self) -> String {
        self.lines.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}
