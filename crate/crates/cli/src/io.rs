//! Text formats: mesh and vector files (one value per line) and Matrix Market
//! coordinate files.
//!
//! Values are written with 17 significant digits, which is enough to read
//! every `f64` back bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use diffmat::{Mesh, SparseBandMatrix};

use crate::error::CliError;

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Formats a double with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Parses one number per line. Blank lines and lines starting with `#` are
/// skipped.
pub fn parse_values(text: &str) -> Result<Vec<f64>, CliError> {
    text.lines()
        .enumerate()
        .map(|(k, line)| (k + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(lineno, line)| {
            line.parse::<f64>().map_err(|_| {
                CliError::Input(format!("ParseError: line {lineno}: '{line}' is not a number"))
            })
        })
        .collect()
}

pub fn format_values(values: &[f64], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for &v in values {
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    out
}

pub fn read_values(path: &Path) -> Result<Vec<f64>, CliError> {
    parse_values(&read_text(path)?)
}

pub fn write_values(path: &Path, values: &[f64], comment: Option<&str>) -> Result<(), CliError> {
    write_text(path, &format_values(values, comment))
}

/// Reads a mesh file and validates the coordinates.
pub fn read_mesh(path: &Path) -> Result<Mesh, CliError> {
    Ok(Mesh::new(read_values(path)?)?)
}

pub fn write_mesh(path: &Path, mesh: &Mesh, comment: Option<&str>) -> Result<(), CliError> {
    write_values(path, mesh.points(), comment)
}

/// Matrix Market text for `matrix`, 1-based, row-major entry order.
pub fn format_matrix_market(matrix: &SparseBandMatrix, comment: Option<&str>) -> String {
    let mut out = String::with_capacity(48 * (matrix.nnz() + 2));
    out.push_str(MM_HEADER);
    out.push('\n');
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "% {line}");
        }
    }
    let _ = writeln!(out, "{} {} {}", matrix.n_rows(), matrix.n_cols(), matrix.nnz());
    for (i, j, v) in matrix.triplets() {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, fmt_f64(v));
    }
    out
}

/// Parses a `coordinate real general` Matrix Market file.
pub fn parse_matrix_market(text: &str) -> Result<SparseBandMatrix, CliError> {
    let bad = |lineno: usize, msg: &str| CliError::Input(format!("ParseError: line {lineno}: {msg}"));
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));

    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields != ["%%matrixmarket", "matrix", "coordinate", "real", "general"] {
        return Err(bad(1, &format!("unsupported header '{header}', expected '{MM_HEADER}'")));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (lineno, size) = body.next().ok_or_else(|| bad(2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| bad(lineno, "size line must hold three integers"))?;
    let &[n_rows, n_cols, nnz] = dims.as_slice() else {
        return Err(bad(lineno, "size line must hold three integers"));
    };

    let mut triplets = Vec::with_capacity(nnz);
    for (lineno, line) in body {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = parts.as_slice() else {
            return Err(bad(lineno, "entry must be 'row col value'"));
        };
        let r: usize = r.parse().map_err(|_| bad(lineno, "row index is not an integer"))?;
        let c: usize = c.parse().map_err(|_| bad(lineno, "column index is not an integer"))?;
        let v: f64 = v.parse().map_err(|_| bad(lineno, "value is not a number"))?;
        if r == 0 || c == 0 {
            return Err(bad(lineno, "indices are 1-based"));
        }
        triplets.push((r - 1, c - 1, v));
    }
    if triplets.len() != nnz {
        return Err(CliError::Input(format!(
            "ParseError: size line announces {nnz} entries, found {}",
            triplets.len()
        )));
    }
    SparseBandMatrix::from_triplets(n_rows, n_cols, triplets)
        .map_err(|e| CliError::Input(format!("ParseError: {e}")))
}

pub fn read_matrix_market(path: &Path) -> Result<SparseBandMatrix, CliError> {
    parse_matrix_market(&read_text(path)?)
}

pub fn write_matrix_market(
    path: &Path,
    matrix: &SparseBandMatrix,
    comment: Option<&str>,
) -> Result<(), CliError> {
    write_text(path, &format_matrix_market(matrix, comment))
}
