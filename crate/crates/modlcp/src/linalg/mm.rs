//! Matrix Market coordinate format (general, real) reader/writer, plus the
//! one-value-per-line vector files the CLI pairs with it. Indices are
//! 1-based on disk and 0-based in memory.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::sparse::SparseMatrix;
use super::LinalgError;

pub fn read_matrix_market(path: &Path) -> Result<SparseMatrix, LinalgError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut lines = reader.lines();

    let header = lines
        .next()
        .ok_or_else(|| LinalgError::MatrixMarket("empty file".into()))??;
    let fields: Vec<String> = header.split_whitespace().map(|s| s.to_lowercase()).collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(LinalgError::MatrixMarket(
            "header must start with '%%MatrixMarket matrix'".into(),
        ));
    }
    if fields[2] != "coordinate" {
        return Err(LinalgError::MatrixMarket(format!(
            "unsupported format '{}': only coordinate is supported",
            fields[2]
        )));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(LinalgError::MatrixMarket(format!(
            "unsupported field '{}': only real/integer are supported",
            fields[3]
        )));
    }
    if fields[4] != "general" {
        return Err(LinalgError::MatrixMarket(format!(
            "unsupported symmetry '{}': only general is supported",
            fields[4]
        )));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        if size.is_none() {
            let rows: usize = parse(it.next(), "row count")?;
            let cols: usize = parse(it.next(), "column count")?;
            let nnz: usize = parse(it.next(), "nonzero count")?;
            if rows != cols {
                return Err(LinalgError::MatrixMarket(format!(
                    "matrix must be square, got {rows} x {cols}"
                )));
            }
            size = Some((rows, cols, nnz));
            triplets.reserve(nnz);
            continue;
        }
        let i: usize = parse(it.next(), "row index")?;
        let j: usize = parse(it.next(), "column index")?;
        let v: f64 = parse(it.next(), "value")?;
        let (n, _, _) = size.unwrap();
        if i == 0 || j == 0 || i > n || j > n {
            return Err(LinalgError::MatrixMarket(format!(
                "entry index ({i}, {j}) out of range for n = {n}"
            )));
        }
        triplets.push((i - 1, j - 1, v));
    }
    let (n, _, nnz) = size.ok_or_else(|| LinalgError::MatrixMarket("missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(LinalgError::MatrixMarket(format!(
            "expected {nnz} entries, found {}",
            triplets.len()
        )));
    }
    // from_triplets normalizes away explicit zeros and rejects duplicates
    SparseMatrix::from_triplets(n, &triplets)
}

fn parse<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T, LinalgError> {
    tok.ok_or_else(|| LinalgError::MatrixMarket(format!("missing {what}")))?
        .parse()
        .map_err(|_| LinalgError::MatrixMarket(format!("cannot parse {what}")))
}

pub fn write_matrix_market(path: &Path, a: &SparseMatrix) -> Result<(), LinalgError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(file, "{} {} {}", a.dim(), a.dim(), a.nnz())?;
    for i in 0..a.dim() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(file, "{} {} {:.17e}", i + 1, j + 1, v)?;
        }
    }
    Ok(())
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>, LinalgError> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
            continue;
        }
        let v: f64 = trimmed.parse().map_err(|_| {
            LinalgError::MatrixMarket(format!("bad vector entry on line {}", lineno + 1))
        })?;
        if !v.is_finite() {
            return Err(LinalgError::MatrixMarket(format!(
                "non-finite vector entry on line {}",
                lineno + 1
            )));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<(), LinalgError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for x in v {
        writeln!(file, "{x:.17e}")?;
    }
    Ok(())
}
