//! Sparse `label index:value ...` text format.
//!
//! ```text
//! 1 1:0.5 3:2    # comment
//! -1
//! ```
//!
//! Indices are 1-based and strictly increasing within a line. Missing
//! indices are zero. Blank lines and `#` comments are ignored; LF and CRLF
//! line endings are both accepted.

use std::io::{self, BufRead, Write};

use crate::data::{DataPoint, Dataset, Outcome};
use crate::error::{CvError, ParseErrorKind, Result};
use crate::scalar::Scalar;

/// One parsed line before densification.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord<T> {
    pub label: T,
    /// `(index >= 1, value)` pairs with strictly increasing indices.
    pub features: Vec<(usize, T)>,
}

fn parse_number<T: Scalar>(tok: &str, kind: fn(String) -> ParseErrorKind) -> Result<T, ParseErrorKind> {
    let v: T = tok.parse().map_err(|_| kind(tok.to_string()))?;
    if !v.is_finite() {
        return Err(ParseErrorKind::NonFinite(tok.to_string()));
    }
    Ok(v)
}

fn parse_line<T: Scalar>(content: &str) -> Result<Option<RawRecord<T>>, ParseErrorKind> {
    let content = content.split('#').next().unwrap_or("");
    let mut tokens = content.split_whitespace();
    let Some(label_tok) = tokens.next() else {
        return Ok(None);
    };
    let label = parse_number(label_tok, ParseErrorKind::Label)?;
    let mut features: Vec<(usize, T)> = Vec::new();
    for tok in tokens {
        let (idx_tok, val_tok) = tok
            .split_once(':')
            .ok_or_else(|| ParseErrorKind::MissingColon(tok.to_string()))?;
        let index: usize = idx_tok
            .parse()
            .map_err(|_| ParseErrorKind::Index(idx_tok.to_string()))?;
        if index == 0 {
            return Err(ParseErrorKind::ZeroIndex);
        }
        if let Some(&(previous, _)) = features.last() {
            if index <= previous {
                return Err(ParseErrorKind::NonMonotoneIndex { previous, index });
            }
        }
        features.push((index, parse_number(val_tok, ParseErrorKind::Value)?));
    }
    Ok(Some(RawRecord { label, features }))
}

/// Parses sparse text into a dense dataset with real-valued outcomes.
///
/// The dimension is `expected_dim` when given (indices beyond it are an
/// error) and the largest index seen otherwise.
pub fn parse_sparse_text<T: Scalar, R: BufRead>(
    reader: R,
    expected_dim: Option<usize>,
) -> Result<Dataset<T>> {
    let mut records = Vec::new();
    let mut max_index = 0;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let at = |kind| CvError::Parse { line: line_no, kind };
        let line = line.map_err(|err| at(ParseErrorKind::Io(err.to_string())))?;
        let Some(record) = parse_line::<T>(&line).map_err(at)? else {
            continue;
        };
        if let Some(&(last, _)) = record.features.last() {
            if let Some(dim) = expected_dim {
                if last > dim {
                    return Err(at(ParseErrorKind::IndexOutOfRange { index: last, dim }));
                }
            }
            max_index = max_index.max(last);
        }
        records.push(record);
    }
    let dim = expected_dim.unwrap_or(max_index);
    let points = records
        .into_iter()
        .map(|r| {
            let mut x = vec![T::zero(); dim];
            for (idx, v) in r.features {
                x[idx - 1] = v;
            }
            DataPoint::real(x, r.label)
        })
        .collect();
    Dataset::new(dim, points)
}

pub fn parse_sparse_str<T: Scalar>(text: &str, expected_dim: Option<usize>) -> Result<Dataset<T>> {
    parse_sparse_text(text.as_bytes(), expected_dim)
}

/// Writes one line per point, eliding zero features.
///
/// Binary labels are written as `+1`/`-1` and unlabeled points as `0`, so
/// they read back as real outcomes.
pub fn write_sparse_text<T: Scalar, W: Write>(dataset: &Dataset<T>, mut out: W) -> io::Result<()> {
    for p in dataset.points() {
        match p.y {
            Outcome::Real(v) => write!(out, "{v:?}")?,
            Outcome::Label(l) => write!(out, "{l}")?,
            Outcome::NoLabel => write!(out, "0")?,
        }
        for (j, v) in p.x.iter().enumerate() {
            if *v != T::zero() {
                write!(out, " {}:{v:?}", j + 1)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn to_sparse_text<T: Scalar>(dataset: &Dataset<T>) -> String {
    let mut buf = Vec::new();
    write_sparse_text(dataset, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("formatter output is UTF-8")
}
