//! Plain-text interchange formats.
//!
//! * Ensemble files: one row per object, one integer label column per base
//!   clustering, comma or tab separated, optional header.
//! * Label files: one integer label per line, optional header line.
//! * Feature files: numeric columns, optional header, optionally an integer
//!   ground-truth label in the last column.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::consensus::canonical_labels;
use crate::data::FeatureDataset;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// Tab when the first non-empty line contains one, comma otherwise.
fn detect_delimiter(text: &str) -> u8 {
    match text.lines().find(|l| !l.trim().is_empty()) {
        Some(line) if line.contains('\t') => b'\t',
        _ => b',',
    }
}

/// Parses a delimited table into trimmed string records. The first record is
/// dropped as a header when `is_header` accepts it.
fn read_table(text: &str, is_header: impl Fn(&[String]) -> bool) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(detect_delimiter(text))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        rows.push(record.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if rows.first().is_some_and(|r| is_header(r)) {
        rows.remove(0);
    }
    if let Some(width) = rows.first().map(Vec::len) {
        if let Some(i) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::input(format!(
                "row {} has {} fields, expected {width}",
                i + 1,
                rows[i].len()
            )));
        }
    }
    Ok(rows)
}

fn parse_cell<T: std::str::FromStr>(cell: &str, row: usize, col: usize, what: &str) -> Result<T> {
    if cell.is_empty() {
        return Err(Error::input(format!("missing {what} at row {}, column {}", row + 1, col + 1)));
    }
    cell.parse().map_err(|_| {
        Error::input(format!(
            "invalid {what} {cell:?} at row {}, column {}",
            row + 1,
            col + 1
        ))
    })
}

fn not_all<T: std::str::FromStr>(row: &[String]) -> bool {
    row.iter().any(|c| !c.is_empty() && c.parse::<T>().is_err())
}

pub fn parse_ensemble<R: Read>(mut input: R) -> Result<Ensemble> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let rows = read_table(&text, not_all::<i64>)?;
    let labels: Vec<Vec<i64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(|(j, c)| parse_cell(c, i, j, "label"))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ensemble::from_rows(&labels)
}

pub fn read_ensemble(path: impl AsRef<Path>) -> Result<Ensemble> {
    parse_ensemble(fs::File::open(path)?)
}

/// Writes an ensemble with its original labels, comma separated, no header.
pub fn write_ensemble<W: Write>(ensemble: &Ensemble, mut out: W) -> Result<()> {
    let mut line = String::new();
    for i in 0..ensemble.n_objects() {
        line.clear();
        for m in 0..ensemble.n_clusterings() {
            if m > 0 {
                line.push(',');
            }
            line.push_str(&ensemble.original_label(i, m).to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn parse_labels<R: Read>(mut input: R) -> Result<Vec<i64>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let rows = read_table(&text, not_all::<i64>)?;
    if rows.first().is_some_and(|r| r.len() != 1) {
        return Err(Error::input("label files hold exactly one column"));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| parse_cell(&r[0], i, 0, "label"))
        .collect()
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    parse_labels(fs::File::open(path)?)
}

/// One label per line, no header.
pub fn write_labels<W: Write>(labels: &[usize], mut out: W) -> Result<()> {
    let mut text = String::with_capacity(labels.len() * 3);
    for l in labels {
        text.push_str(&l.to_string());
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Parses a feature table. With `label_column` the last column is read as
/// integer ground truth and relabeled densely by first appearance.
pub fn parse_features<R: Read>(mut input: R, label_column: bool) -> Result<FeatureDataset> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let rows = read_table(&text, not_all::<f64>)?;
    let width = rows.first().map_or(0, Vec::len);
    let d = if label_column { width.saturating_sub(1) } else { width };
    if rows.is_empty() || d == 0 {
        return Err(Error::input("feature file has no feature columns"));
    }
    let mut values = Vec::with_capacity(rows.len() * d);
    let mut truth = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        for (j, c) in r[..d].iter().enumerate() {
            values.push(parse_cell::<f64>(c, i, j, "feature")?);
        }
        if label_column {
            truth.push(parse_cell::<i64>(&r[d], i, d, "label")?);
        }
    }
    let data = FeatureDataset::new(rows.len(), d, values)?;
    if label_column {
        data.with_truth(canonical_labels(&truth))
    } else {
        Ok(data)
    }
}

pub fn read_features(path: impl AsRef<Path>, label_column: bool) -> Result<FeatureDataset> {
    parse_features(fs::File::open(path)?, label_column)
}
