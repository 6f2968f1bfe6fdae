//! Plain CSV text for matrices, label vectors and ground-truth masks.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::mask::LabelMask;
use super::matrix::SpectraMatrix;
use crate::error::{Error, Result};

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        line,
        column: 0,
        message: e.to_string(),
    }
}

/// Parses comma-separated rows of numbers; all rows must have equal length.
pub fn parse_csv_matrix(text: &str) -> Result<SpectraMatrix> {
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader(text).records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Format(format!(
                    "line {line}: expected {w} values, found {}",
                    record.len()
                )))
            }
            _ => {}
        }
        for (column, token) in record.iter().enumerate() {
            let v: f64 = token.parse().map_err(|_| Error::Parse {
                line,
                column: column + 1,
                message: format!("not a number: {token:?}"),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let Some(d) = width else {
        return Err(Error::Format("no data rows".into()));
    };
    SpectraMatrix::new(values, rows, d)
}

pub fn read_csv_matrix(path: &Path) -> Result<SpectraMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_matrix(&text)
}

/// Rust's shortest round-trip float formatting, so reads are bit-exact.
pub fn format_csv_matrix(m: &SpectraMatrix) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_csv_matrix(m: &SpectraMatrix, path: &Path) -> Result<()> {
    fs::write(path, format_csv_matrix(m)).map_err(|e| Error::io(path, e))
}

/// Integer tokens separated by commas and/or newlines. A first line with
/// any non-integer token is taken as a header of names.
fn parse_integer_list(text: &str) -> Result<(Option<Vec<String>>, Vec<usize>)> {
    let mut names = None;
    let mut labels = Vec::new();
    let mut first = true;
    for record in reader(text).records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first && record.iter().any(|t| t.parse::<i64>().is_err()) {
            names = Some(record.iter().map(str::to_string).collect());
            first = false;
            continue;
        }
        first = false;
        for (column, token) in record.iter().enumerate() {
            if token.is_empty() {
                continue;
            }
            let v: i64 = token.parse().map_err(|_| Error::Parse {
                line,
                column: column + 1,
                message: format!("not an integer: {token:?}"),
            })?;
            if v < 0 {
                return Err(Error::Format(format!(
                    "line {line}, column {}: negative label {v}",
                    column + 1
                )));
            }
            labels.push(v as usize);
        }
    }
    Ok((names, labels))
}

pub fn parse_label_mask(text: &str, n: usize) -> Result<LabelMask> {
    let (names, labels) = parse_integer_list(text)?;
    if labels.len() != n {
        return Err(Error::Size(format!(
            "mask has {} entries, data has {n} pixels",
            labels.len()
        )));
    }
    LabelMask::new(labels, names)
}

pub fn read_label_mask(path: &Path, n: usize) -> Result<LabelMask> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_label_mask(&text, n)
}

pub fn format_label_mask(mask: &LabelMask) -> String {
    let mut out = mask.class_names().join(",");
    out.push('\n');
    for l in mask.labels() {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out
}

pub fn write_label_mask(mask: &LabelMask, path: &Path) -> Result<()> {
    fs::write(path, format_label_mask(mask)).map_err(|e| Error::io(path, e))
}

/// Cluster labels, one per line.
pub fn write_labels(labels: &[usize], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for l in labels {
        writeln!(w, "{l}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (names, labels) = parse_integer_list(&text)?;
    if names.is_some() {
        return Err(Error::Format(format!(
            "{}: label file must contain integers only",
            path.display()
        )));
    }
    if labels.is_empty() {
        return Err(Error::Format(format!("{}: no labels", path.display())));
    }
    Ok(labels)
}
