//! Plain-text matrix format.
//!
//! ```text
//! <rows> <cols>
//! a11 a12 ...
//! a21 a22 ...
//! ```
//!
//! Entries are whitespace-separated and may wrap across lines freely; only
//! the total count matters. The writer emits one row per line with 17
//! significant digits, which is enough for any `f64` to round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Whitespace-separated tokens with their 1-based line and column.
fn tokens(text: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    text.lines().enumerate().flat_map(|(li, line)| {
        let mut out = Vec::new();
        let mut start = None;
        for (ci, ch) in line.char_indices() {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(ci),
                (true, Some(s)) => {
                    out.push((li + 1, line[..s].chars().count() + 1, &line[s..ci]));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((li + 1, line[..s].chars().count() + 1, &line[s..]));
        }
        out
    })
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    let mut toks = tokens(text);

    let mut dim = |what: &str| -> Result<usize> {
        let (line, col, tok) = toks
            .next()
            .ok_or_else(|| Error::parse(1, 1, format!("missing {what} count")))?;
        let n: usize = tok
            .parse()
            .map_err(|_| Error::parse(line, col, format!("invalid {what} count '{tok}'")))?;
        if n == 0 {
            return Err(Error::parse(line, col, format!("{what} count must be positive")));
        }
        if line != 1 {
            return Err(Error::parse(line, col, "header must be '<rows> <cols>' on line 1"));
        }
        Ok(n)
    };
    let rows = dim("row")?;
    let cols = dim("column")?;

    let expected = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::parse(1, 1, "matrix dimensions overflow"))?;
    let mut data = Vec::with_capacity(expected);
    let mut last = (1, 1);
    for (line, col, tok) in toks {
        if data.len() == expected {
            return Err(Error::parse(
                line,
                col,
                format!("unexpected extra entry '{tok}' after {expected} values"),
            ));
        }
        let x: f64 = tok
            .parse()
            .map_err(|_| Error::parse(line, col, format!("invalid number '{tok}'")))?;
        if !x.is_finite() {
            return Err(Error::parse(line, col, format!("non-finite entry '{tok}'")));
        }
        data.push(x);
        last = (line, col + tok.chars().count());
    }
    if data.len() != expected {
        return Err(Error::parse(
            last.0,
            last.1,
            format!("expected {expected} entries for {rows}x{cols}, found {}", data.len()),
        ));
    }
    Matrix::new(rows, cols, data)
}

pub fn format_matrix(m: &Matrix) -> String {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_matrix(m).as_bytes())?;
    Ok(())
}
