//! Influence matrices as CSV: one row per output, one column per training
//! item, header `output_id,<training ids...>`.

use std::io::{Read, Write};

use airoyalties_core::influence::{InfluenceError, InfluenceMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InfluenceCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error(transparent)]
    Invalid(#[from] InfluenceError),
}

pub fn read_influence<R: Read>(input: R) -> Result<InfluenceMatrix, InfluenceCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("output_id") {
        return Err(InfluenceCsvError::Malformed {
            line: 1,
            reason: "first column must be output_id".into(),
        });
    }
    let training_ids: Vec<String> = headers.iter().skip(1).map(String::from).collect();
    let mut output_ids = Vec::new();
    let mut weights = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let mut fields = record.iter();
        output_ids.push(fields.next().unwrap_or_default().to_string());
        let row = fields
            .map(|f| {
                f.parse::<f64>().map_err(|e| InfluenceCsvError::Malformed {
                    line,
                    reason: format!("{f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        weights.push(row);
    }
    Ok(InfluenceMatrix::new(output_ids, training_ids, weights)?)
}

pub fn write_influence<W: Write>(m: &InfluenceMatrix, out: W) -> Result<(), InfluenceCsvError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(
        std::iter::once("output_id").chain(m.training_ids().iter().map(String::as_str)),
    )?;
    for (id, row) in m.output_ids().iter().zip(m.rows()) {
        let mut record = vec![id.clone()];
        record.extend(row.iter().map(f64::to_string));
        writer.write_record(&record)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
