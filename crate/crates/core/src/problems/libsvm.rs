//! LIBSVM / SVMlight text format.
//!
//! Each data line is `<label> <index>:<value> ...` with 1-based, strictly
//! ascending indices. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::problems::DataMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmData {
    pub labels: Vec<f64>,
    /// Per-sample `(index, value)` pairs with 0-based indices.
    pub rows: Vec<Vec<(usize, f64)>>,
    /// Largest index seen (the number of features).
    pub n_features: usize,
}

impl LibsvmData {
    /// CSR matrix with at least `min_cols` columns.
    pub fn to_matrix(&self, min_cols: usize) -> Result<DataMatrix> {
        DataMatrix::sparse(self.n_features.max(min_cols), &self.rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<LibsvmData> {
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    let mut n_features = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| parse_err(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label `{label_tok}`")))?;
        if !label.is_finite() {
            return Err(parse_err(lineno, format!("non-finite label `{label_tok}`")));
        }
        let mut row = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(lineno, format!("expected index:value, got `{tok}`")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad index in `{tok}`")))?;
            if idx == 0 {
                return Err(parse_err(lineno, "indices are 1-based; found 0"));
            }
            if idx <= last {
                return Err(parse_err(
                    lineno,
                    format!("index {idx} does not ascend (previous {last})"),
                ));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad value in `{tok}`")))?;
            if !val.is_finite() {
                return Err(parse_err(lineno, format!("non-finite value in `{tok}`")));
            }
            last = idx;
            row.push((idx - 1, val));
        }
        n_features = n_features.max(last);
        labels.push(label);
        rows.push(row);
    }
    Ok(LibsvmData {
        labels,
        rows,
        n_features,
    })
}

pub fn read_libsvm(path: impl AsRef<Path>) -> Result<LibsvmData> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_libsvm(std::io::BufReader::new(file))
}

/// Serializes in the same format; values use the shortest round-trip form.
pub fn write_libsvm(data: &LibsvmData) -> String {
    let mut out = String::new();
    for (label, row) in data.labels.iter().zip(&data.rows) {
        let _ = write!(out, "{label}");
        for (j, v) in row {
            let _ = write!(out, " {}:{v}", j + 1);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<LibsvmData> {
        parse_libsvm(s.as_bytes())
    }

    #[test]
    fn basic_lines() {
        let d = parse("+1 1:0.5 3:2\n").unwrap();
        assert_eq!(d.labels, vec![1.0]);
        assert_eq!(d.to_matrix(0).unwrap().to_dense_rows(), vec![vec![0.5, 0.0, 2.0]]);
        let d = parse("-1 2:1\n").unwrap();
        assert_eq!(d.labels, vec![-1.0]);
        assert_eq!(d.to_matrix(0).unwrap().to_dense_rows(), vec![vec![0.0, 1.0]]);
    }

    #[test]
    fn comments_and_blanks() {
        let d = parse("# header\n\n+1 1:1\n   \n-1 2:1\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.n_features, 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse("+1 1:1\n+1 3:1 2:1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse("+1 0:1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("+1 1:1 1:2\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("+1 a:1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("+1 1=1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("x 1:1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("1 1:nan\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn label_only_line() {
        let d = parse("-1\n").unwrap();
        assert_eq!(d.rows, vec![vec![]]);
        assert_eq!(d.n_features, 0);
    }
}
