//! File formats: loss matrices as CSV, population models as JSON, rating
//! tables as CSV, and group labels as plain lines.
//!
//! Parsers accept untrusted text and never panic: every malformed input
//! maps to [`Error::Data`] with enough position detail to fix the file,
//! and every parsed value passes through the same domain validation the
//! in-memory constructors enforce. Writers and parsers round-trip
//! losslessly because floats are emitted in shortest-round-trip form.
//!
//! Formats:
//!
//! - **Matrix CSV**: `K` rows of `K` comma-separated floats, no header.
//! - **Model JSON**: `{"p": [...], "u": [[...], ...]}`, the group mixture
//!   weights and one like-probability row per group; unknown keys are
//!   rejected.
//! - **Ratings CSV**: one row per user, one column per item, entries 0/1
//!   (validated downstream by ingestion, which also defines group means).
//! - **Groups**: one label per line, leading/trailing whitespace trimmed;
//!   interior blank lines are malformed.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{LossMatrix, PopulationModel};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Parses rectangular CSV of floats into a [`Matrix`].
fn parse_float_csv(text: &str, what: &str) -> Result<Matrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut data: Vec<f64> = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Error::Data(format!("{what} CSV row {}: {e}", row + 1)))?;
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Data(format!(
                    "{what} CSV row {} has {} fields, expected {c}",
                    row + 1,
                    record.len()
                )));
            }
            Some(_) => {}
        }
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "{what} CSV row {} field {}: '{field}' is not a number",
                    row + 1,
                    col + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "{what} CSV row {} field {}: {v} is not finite",
                    row + 1,
                    col + 1
                )));
            }
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::Data(format!("{what} CSV is empty")));
    }
    Matrix::new(rows, cols, data)
}

/// Parses a square loss matrix from headerless CSV and validates the loss
/// invariants (symmetry, entries in [0,1], positive semidefinite).
pub fn parse_matrix_csv(text: &str) -> Result<LossMatrix> {
    let m = parse_float_csv(text, "loss matrix")?;
    if !m.is_square() {
        return Err(Error::Data(format!(
            "loss matrix CSV is {}x{}, expected square",
            m.rows(),
            m.cols()
        )));
    }
    LossMatrix::from_matrix(m)
}

/// Parses any rectangular float CSV in the same format, without loss
/// validation: the reader for completion outputs, which can stray
/// marginally outside the loss invariants.
pub fn parse_raw_matrix_csv(text: &str) -> Result<Matrix> {
    parse_float_csv(text, "matrix")
}

/// Serializes a loss matrix as headerless CSV with shortest-round-trip
/// floats; [`parse_matrix_csv`] restores it bit-exactly.
pub fn write_matrix_csv(l: &LossMatrix) -> String {
    write_raw_matrix_csv(l.matrix())
}

/// Serializes any matrix in the same headerless CSV format, without loss
/// validation. Completions of approximately-low-rank inputs need this:
/// they can stray marginally outside the loss invariants.
pub fn write_raw_matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&ryu_format(m.get(i, j)));
        }
        out.push('\n');
    }
    out
}

/// Shortest decimal form that parses back to the same f64 (Rust's default
/// float Display guarantees round-trip).
fn ryu_format(v: f64) -> String {
    format!("{v}")
}

/// On-disk JSON shape of a population model. The wire keys are the short
/// names the file format fixes; the struct fields carry the meaning.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    /// Group mixture weights, summing to 1.
    #[serde(rename = "p")]
    weights: Vec<f64>,
    /// Per-group like-probability rows, one per group, `K` items each.
    #[serde(rename = "u")]
    likes: Vec<Vec<f64>>,
}

/// Parses a population model from JSON and validates the mixture
/// invariants (weights a probability vector, probabilities in [0,1]).
pub fn parse_model_json(text: &str) -> Result<PopulationModel> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Data(format!("model JSON: {e}")))?;
    PopulationModel::new(file.weights, file.likes)
}

/// Serializes a population model as pretty-printed JSON.
pub fn write_model_json(model: &PopulationModel) -> String {
    let file = ModelFile {
        weights: model.weights().to_vec(),
        likes: model.likes().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("model serialization cannot fail") + "\n"
}

/// Parses a rectangular users-by-items rating table from headerless CSV.
/// Binary-ness is the ingestion step's contract, not the parser's, so any
/// finite values load; shapes and numbers are still validated here.
pub fn parse_ratings_csv(text: &str) -> Result<Matrix> {
    parse_float_csv(text, "ratings")
}

/// Parses one group label per line. Labels are trimmed; a blank interior
/// line is malformed (a trailing newline is fine).
pub fn parse_groups(text: &str) -> Result<Vec<String>> {
    let mut labels: Vec<String> = Vec::new();
    let mut pending_blanks = 0usize;
    for (n, line) in text.lines().enumerate() {
        let label = line.trim();
        if label.is_empty() {
            pending_blanks += 1;
            continue;
        }
        if pending_blanks > 0 {
            return Err(Error::Data(format!("blank group label above line {}", n + 1)));
        }
        labels.push(label.to_string());
    }
    Ok(labels)
}

/// Reads and parses a loss matrix CSV file.
pub fn load_matrix(path: &Path) -> Result<LossMatrix> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

/// Writes a loss matrix CSV file.
pub fn save_matrix(path: &Path, l: &LossMatrix) -> Result<()> {
    Ok(std::fs::write(path, write_matrix_csv(l))?)
}

/// Writes any matrix as a CSV file, without loss validation.
pub fn save_raw_matrix(path: &Path, m: &Matrix) -> Result<()> {
    Ok(std::fs::write(path, write_raw_matrix_csv(m))?)
}

/// Reads any rectangular float CSV, without loss validation.
pub fn load_raw_matrix(path: &Path) -> Result<Matrix> {
    parse_raw_matrix_csv(&std::fs::read_to_string(path)?)
}

/// Reads and parses a population model JSON file.
pub fn load_model(path: &Path) -> Result<PopulationModel> {
    parse_model_json(&std::fs::read_to_string(path)?)
}

/// Writes a population model JSON file.
pub fn save_model(path: &Path, model: &PopulationModel) -> Result<()> {
    Ok(std::fs::write(path, write_model_json(model))?)
}

/// Reads and parses a ratings CSV file.
pub fn load_ratings(path: &Path) -> Result<Matrix> {
    parse_ratings_csv(&std::fs::read_to_string(path)?)
}

/// Reads and parses a group-label file.
pub fn load_groups(path: &Path) -> Result<Vec<String>> {
    parse_groups(&std::fs::read_to_string(path)?)
}
