//! Shared helpers for the line-oriented text formats (GRAD-1, HESS-1,
//! QUBO-1, ISING-1).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Non-empty lines of a file, paired with their 1-based line numbers.
pub(crate) struct Lines<'a> {
    path: &'a Path,
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(path: &'a Path, text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Lines {
            path,
            lines,
            pos: 0,
        }
    }

    pub(crate) fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.next() {
            Some(pair) => Ok(pair),
            None => {
                let last = self.lines.last().map_or(1, |(n, _)| *n);
                Err(Error::parse(
                    self.path,
                    last,
                    format!("unexpected end of file, expected {what}"),
                ))
            }
        }
    }

    pub(crate) fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.lines.get(self.pos).copied();
        self.pos += 1;
        item
    }

    pub(crate) fn expect_end(&mut self) -> Result<()> {
        match self.next() {
            None => Ok(()),
            Some((line, _)) => Err(Error::parse(self.path, line, "unexpected trailing content")),
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_string(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses a header of the form `<MAGIC> <int> <int> ...` with exactly
/// `arity` integer fields.
pub(crate) fn parse_header(
    path: &Path,
    line_no: usize,
    line: &str,
    magic: &str,
    arity: usize,
) -> Result<Vec<usize>> {
    let mut fields = line.split_whitespace();
    if fields.next() != Some(magic) {
        return Err(Error::parse(
            path,
            line_no,
            format!("expected header starting with `{magic}`"),
        ));
    }
    let values = fields
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| Error::parse(path, line_no, format!("invalid header field `{f}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != arity {
        return Err(Error::parse(
            path,
            line_no,
            format!(
                "header `{magic}` takes {arity} integer field(s), found {}",
                values.len()
            ),
        ));
    }
    Ok(values)
}

pub(crate) fn parse_finite(path: &Path, line_no: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| Error::parse(path, line_no, format!("invalid number `{token}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(
            path,
            line_no,
            format!("non-finite value `{token}`"),
        ));
    }
    Ok(v)
}

pub(crate) fn parse_index(path: &Path, line_no: usize, token: &str, n: usize) -> Result<usize> {
    let i: usize = token
        .parse()
        .map_err(|_| Error::parse(path, line_no, format!("invalid index `{token}`")))?;
    if i >= n {
        return Err(Error::parse(
            path,
            line_no,
            format!("index {i} out of range for {n} variables"),
        ));
    }
    Ok(i)
}

/// Parses one row of exactly `expected` whitespace-separated finite floats.
pub(crate) fn parse_row(
    path: &Path,
    line_no: usize,
    line: &str,
    expected: usize,
) -> Result<Vec<f64>> {
    let row = line
        .split_whitespace()
        .map(|t| parse_finite(path, line_no, t))
        .collect::<Result<Vec<_>>>()?;
    if row.len() != expected {
        return Err(Error::parse(
            path,
            line_no,
            format!("expected {expected} values, found {}", row.len()),
        ));
    }
    Ok(row)
}

/// Formats a dense row-major matrix, one row per line. `{}` on f64 prints
/// the shortest representation that parses back to the same bits.
pub(crate) fn format_rows(out: &mut String, cols: usize, values: &[f64]) {
    for row in values.chunks(cols) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
}
