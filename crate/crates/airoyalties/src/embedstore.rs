//! Line-delimited embedding files.
//!
//! One JSON object per line with keys `work_id`, `model_id`, `dim` and
//! `vector`; unknown keys are ignored and blank lines skipped. This is the
//! format the image extractor writes.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use airoyalties_core::{EmbeddingRecord, EmbeddingStore, StoreError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("embedding file {0} not found")]
    MissingFile(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("line {line}: duplicate work_id {work_id}")]
    DuplicateWorkId { line: usize, work_id: String },
    #[error("line {line}: {source}")]
    DimensionMismatch { line: usize, source: StoreError },
    #[error("line {line}: {source}")]
    ModelMismatch { line: usize, source: StoreError },
}

#[derive(Debug, Deserialize, Serialize)]
struct Line<'a> {
    #[serde(borrow)]
    work_id: std::borrow::Cow<'a, str>,
    #[serde(borrow)]
    model_id: std::borrow::Cow<'a, str>,
    dim: usize,
    vector: Vec<f64>,
}

pub fn load_store(path: &Path) -> Result<EmbeddingStore, LoadError> {
    let file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => LoadError::MissingFile(path.to_path_buf()),
        _ => LoadError::Io {
            path: path.to_path_buf(),
            source: e,
        },
    })?;
    read_store(BufReader::new(file)).map_err(|e| match e {
        LoadError::Io { source, .. } => LoadError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn read_store<R: BufRead>(reader: R) -> Result<EmbeddingStore, LoadError> {
    let mut store = EmbeddingStore::new();
    for (idx, text) in reader.lines().enumerate() {
        let line = idx + 1;
        let text = text.map_err(|source| LoadError::Io {
            path: PathBuf::new(),
            source,
        })?;
        if text.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&text).map_err(|e| LoadError::MalformedRecord {
            line,
            reason: e.to_string(),
        })?;
        let record =
            EmbeddingRecord::new(parsed.work_id, parsed.model_id, parsed.dim, parsed.vector)
                .map_err(|e| LoadError::MalformedRecord {
                    line,
                    reason: e.to_string(),
                })?;
        store.insert(record).map_err(|e| match e {
            StoreError::DuplicateWorkId(work_id) => LoadError::DuplicateWorkId { line, work_id },
            e @ StoreError::ModelMismatch { .. } => LoadError::ModelMismatch { line, source: e },
            e => LoadError::DimensionMismatch { line, source: e },
        })?;
    }
    Ok(store)
}

/// Writes records in `work_id` order. Floats use the shortest representation
/// that parses back to the same bits.
pub fn write_store<W: Write>(store: &EmbeddingStore, mut out: W) -> std::io::Result<()> {
    for r in store.records() {
        let line = Line {
            work_id: r.work_id().into(),
            model_id: r.model_id().into(),
            dim: r.dim(),
            vector: r.vector().to_vec(),
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
