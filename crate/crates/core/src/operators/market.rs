//! Matrix Market coordinate files. Complex matrices are realified as
//! `[[Re, −Im], [Im, Re]]`, doubling the dimension, so the solvers stay in
//! real arithmetic.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let reader = BufReader::new(File::open(path)?);
    parse(reader)
}

fn parse(reader: impl BufRead) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let banner = banner?;
    let tokens: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "missing %%MatrixMarket matrix banner"));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::Unsupported(format!("format {:?}", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(Error::Unsupported(format!("field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::Unsupported(format!("symmetry {other:?}"))),
    };

    let mut size = None;
    for (no, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let v: Vec<usize> = t
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(no, format!("bad size token {s:?}"))))
            .collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(parse_err(no, "size line needs rows cols nnz"));
        }
        size = Some((no, v[0], v[1], v[2]));
        break;
    }
    let (size_line, rows, cols, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(size_line, "symmetric storage requires a square matrix"));
    }

    let mut entries: Vec<(usize, usize, f64, f64)> = Vec::with_capacity(nnz);
    for (no, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let mut index = |what: &str, bound: usize| -> Result<usize> {
            let s = it.next().ok_or_else(|| parse_err(no, format!("missing {what}")))?;
            let k: usize = s.parse().map_err(|_| parse_err(no, format!("bad {what} {s:?}")))?;
            if k == 0 || k > bound {
                return Err(parse_err(no, format!("{what} {k} out of range 1..={bound}")));
            }
            Ok(k - 1)
        };
        let i = index("row index", rows)?;
        let j = index("column index", cols)?;
        let mut value = |what: &str| -> Result<f64> {
            let s = it.next().ok_or_else(|| parse_err(no, format!("missing {what}")))?;
            s.parse().map_err(|_| parse_err(no, format!("bad {what} {s:?}")))
        };
        let re = value("value")?;
        let im = if field == Field::Complex {
            value("imaginary part")?
        } else {
            0.0
        };
        entries.push((i, j, re, im));
    }
    if entries.len() != nnz {
        return Err(parse_err(
            size_line,
            format!("declared {nnz} entries, found {}", entries.len()),
        ));
    }

    let mut full = Vec::with_capacity(2 * entries.len());
    for (i, j, re, im) in entries {
        full.push((i, j, re, im));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => full.push((j, i, re, im)),
                Symmetry::Skew => full.push((j, i, -re, -im)),
                Symmetry::Hermitian => full.push((j, i, re, -im)),
            }
        }
    }

    match field {
        Field::Real => {
            let t: Vec<_> = full.into_iter().map(|(i, j, v, _)| (i, j, v)).collect();
            SparseMatrix::from_triplets(rows, cols, &t)
        }
        Field::Complex => {
            let mut t = Vec::with_capacity(4 * full.len());
            for (i, j, re, im) in full {
                t.push((i, j, re));
                t.push((i + rows, j + cols, re));
                if im != 0.0 {
                    t.push((i, j + cols, -im));
                    t.push((i + rows, j, im));
                }
            }
            SparseMatrix::from_triplets(2 * rows, 2 * cols, &t)
        }
    }
}

/// Writes `m` as `coordinate real general` with round-trip precision.
pub fn write_matrix_market(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}
