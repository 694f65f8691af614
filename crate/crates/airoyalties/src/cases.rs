//! The rulings CSV.
//!
//! Header: `case_id,case_name,original_id,derivative_id,label,reported_metric,year,notes`.
//! `reported_metric`, `year` and `notes` may be empty.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use airoyalties_core::rulings::{CasePair, RulingLabel, RulingsError};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CasesError {
    #[error("rulings file {0} not found")]
    MissingFile(PathBuf),
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("line {line}: unknown label {label:?}")]
    UnknownLabel { line: u64, label: String },
    #[error("line {line}: duplicate case_id {case_id}")]
    DuplicatePairId { line: u64, case_id: String },
}

#[derive(Debug, Deserialize)]
struct Row {
    case_id: String,
    case_name: String,
    original_id: String,
    derivative_id: String,
    label: String,
    reported_metric: Option<f64>,
    year: Option<i32>,
    notes: Option<String>,
}

pub fn load_cases(path: &Path) -> Result<Vec<CasePair>, CasesError> {
    let reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::NotFound => {
                CasesError::MissingFile(path.to_path_buf())
            }
            _ => CasesError::MalformedRow {
                line: 0,
                reason: format!("{}: {e}", path.display()),
            },
        })?;
    parse(reader)
}

pub fn read_cases<R: std::io::Read>(input: R) -> Result<Vec<CasePair>, CasesError> {
    parse(
        csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input),
    )
}

fn parse<R: std::io::Read>(mut reader: csv::Reader<R>) -> Result<Vec<CasePair>, CasesError> {
    let headers = reader
        .headers()
        .map_err(|e| CasesError::MalformedRow {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CasesError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row: Row =
            record
                .deserialize(Some(&headers))
                .map_err(|e| CasesError::MalformedRow {
                    line,
                    reason: e.to_string(),
                })?;
        let label = row
            .label
            .parse::<RulingLabel>()
            .map_err(|_| CasesError::UnknownLabel {
                line,
                label: row.label.clone(),
            })?;
        if !seen.insert(row.case_id.clone()) {
            return Err(CasesError::DuplicatePairId {
                line,
                case_id: row.case_id,
            });
        }
        let pair = CasePair {
            case_id: row.case_id,
            case_name: row.case_name,
            original_id: row.original_id,
            derivative_id: row.derivative_id,
            label,
            reported_metric: row.reported_metric,
            year: row.year,
            notes: row.notes.filter(|n| !n.is_empty()),
        };
        pair.validate()
            .map_err(|e: RulingsError| CasesError::MalformedRow {
                line,
                reason: e.to_string(),
            })?;
        if pair.case_id.is_empty() || pair.original_id.is_empty() || pair.derivative_id.is_empty() {
            return Err(CasesError::MalformedRow {
                line,
                reason: "case_id, original_id and derivative_id are required".into(),
            });
        }
        pairs.push(pair);
    }
    Ok(pairs)
}
