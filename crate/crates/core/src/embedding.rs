//! Embedding records and the in-memory store shared by every other module.
//!
//! A store holds vectors from exactly one embedding model. Similarity values
//! computed across two different embedding spaces carry no meaning, so mixing
//! models (or widths) is rejected on insert rather than at comparison time.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("work_id must not be empty")]
    EmptyWorkId,
    #[error("record {work_id}: declared dim {declared} but vector has {actual} components")]
    LengthMismatch {
        work_id: String,
        declared: usize,
        actual: usize,
    },
    #[error("record {work_id}: dim must be positive")]
    ZeroDim { work_id: String },
    #[error("record {work_id}: component {index} is not finite")]
    NonFinite { work_id: String, index: usize },
    #[error("duplicate work_id {0}")]
    DuplicateWorkId(String),
    #[error("record {work_id}: dim {found} does not match store dim {expected}")]
    DimensionMismatch {
        work_id: String,
        expected: usize,
        found: usize,
    },
    #[error("record {work_id}: model {found} does not match store model {expected}")]
    ModelMismatch {
        work_id: String,
        expected: String,
        found: String,
    },
    #[error("unknown work_id {0}")]
    UnknownWorkId(String),
}

/// One work's identity and its embedding vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingRecord {
    work_id: String,
    model_id: String,
    vector: Vec<f64>,
}

impl EmbeddingRecord {
    /// Builds a record, checking that `dim` matches the vector and that
    /// every component is finite.
    pub fn new(
        work_id: impl Into<String>,
        model_id: impl Into<String>,
        dim: usize,
        vector: Vec<f64>,
    ) -> Result<Self, StoreError> {
        let work_id = work_id.into();
        if work_id.is_empty() {
            return Err(StoreError::EmptyWorkId);
        }
        if dim == 0 {
            return Err(StoreError::ZeroDim { work_id });
        }
        if vector.len() != dim {
            return Err(StoreError::LengthMismatch {
                work_id,
                declared: dim,
                actual: vector.len(),
            });
        }
        if let Some(index) = vector.iter().position(|x| !x.is_finite()) {
            return Err(StoreError::NonFinite { work_id, index });
        }
        Ok(Self {
            work_id,
            model_id: model_id.into(),
            vector,
        })
    }

    pub fn work_id(&self) -> &str {
        &self.work_id
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }

    pub fn vector(&self) -> &[f64] {
        &self.vector
    }
}

/// Immutable-after-load collection of records from a single embedding model.
///
/// Iteration order is by `work_id`, so anything derived from a store is
/// independent of the order records were inserted in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    records: BTreeMap<String, EmbeddingRecord>,
    model_id: Option<String>,
    dim: Option<usize>,
}

impl EmbeddingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<I>(records: I) -> Result<Self, StoreError>
    where
        I: IntoIterator<Item = EmbeddingRecord>,
    {
        let mut store = Self::new();
        for record in records {
            store.insert(record)?;
        }
        Ok(store)
    }

    /// Adds a record. The first record fixes the store's model and width.
    pub fn insert(&mut self, record: EmbeddingRecord) -> Result<(), StoreError> {
        if self.records.contains_key(record.work_id()) {
            return Err(StoreError::DuplicateWorkId(record.work_id));
        }
        if let Some(dim) = self.dim {
            if record.dim() != dim {
                return Err(StoreError::DimensionMismatch {
                    work_id: record.work_id,
                    expected: dim,
                    found: record.vector.len(),
                });
            }
        }
        if let Some(model) = &self.model_id {
            if record.model_id() != model {
                return Err(StoreError::ModelMismatch {
                    work_id: record.work_id,
                    expected: model.clone(),
                    found: record.model_id,
                });
            }
        }
        self.dim.get_or_insert(record.dim());
        self.model_id.get_or_insert_with(|| record.model_id.clone());
        self.records.insert(record.work_id.clone(), record);
        Ok(())
    }

    pub fn get(&self, work_id: &str) -> Result<&EmbeddingRecord, StoreError> {
        self.records
            .get(work_id)
            .ok_or_else(|| StoreError::UnknownWorkId(work_id.into()))
    }

    pub fn contains(&self, work_id: &str) -> bool {
        self.records.contains_key(work_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `None` for an empty store.
    pub fn model_id(&self) -> Option<&str> {
        self.model_id.as_deref()
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    pub fn records(&self) -> impl Iterator<Item = &EmbeddingRecord> {
        self.records.values()
    }

    pub fn work_ids(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rec(id: &str, model: &str, v: Vec<f64>) -> EmbeddingRecord {
        let dim = v.len();
        EmbeddingRecord::new(id, model, dim, v).unwrap()
    }

    #[test]
    fn record_rejects_bad_shapes() {
        assert_eq!(
            EmbeddingRecord::new("", "m", 1, vec![1.0]),
            Err(StoreError::EmptyWorkId)
        );
        assert!(matches!(
            EmbeddingRecord::new("a", "m", 3, vec![1.0, 2.0]),
            Err(StoreError::LengthMismatch {
                declared: 3,
                actual: 2,
                ..
            })
        ));
        assert!(matches!(
            EmbeddingRecord::new("a", "m", 2, vec![1.0, f64::NAN]),
            Err(StoreError::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            EmbeddingRecord::new("a", "m", 1, vec![f64::INFINITY]),
            Err(StoreError::NonFinite { index: 0, .. })
        ));
        assert!(matches!(
            EmbeddingRecord::new("a", "m", 0, vec![]),
            Err(StoreError::ZeroDim { .. })
        ));
    }

    #[test]
    fn store_rejects_mixed_models_and_widths() {
        let mut store = EmbeddingStore::new();
        store.insert(rec("a", "m1", vec![1.0, 0.0])).unwrap();
        assert!(matches!(
            store.insert(rec("b", "m1", vec![1.0, 0.0, 0.0])),
            Err(StoreError::DimensionMismatch {
                expected: 2,
                found: 3,
                ..
            })
        ));
        assert!(matches!(
            store.insert(rec("b", "m2", vec![1.0, 0.0])),
            Err(StoreError::ModelMismatch { .. })
        ));
        assert_eq!(
            store.insert(rec("a", "m1", vec![0.0, 1.0])),
            Err(StoreError::DuplicateWorkId("a".into()))
        );
        assert_eq!(store.len(), 1);
        assert_eq!(store.model_id(), Some("m1"));
        assert_eq!(store.dim(), Some(2));
    }

    #[test]
    fn get_known_and_unknown() {
        let store =
            EmbeddingStore::from_records([rec("kienitz_original", "m", vec![0.3, 0.4])]).unwrap();
        assert_eq!(
            store.get("kienitz_original").unwrap().vector(),
            &[0.3, 0.4][..]
        );
        assert_eq!(
            store.get("absent"),
            Err(StoreError::UnknownWorkId("absent".into()))
        );
        let empty = EmbeddingStore::new();
        assert!(empty.is_empty());
        assert_eq!(empty.model_id(), None);
        assert!(matches!(empty.get("x"), Err(StoreError::UnknownWorkId(_))));
    }

    #[test]
    fn iteration_is_sorted_by_id() {
        let store = EmbeddingStore::from_records([
            rec("c", "m", vec![1.0]),
            rec("a", "m", vec![1.0]),
            rec("b", "m", vec![1.0]),
        ])
        .unwrap();
        let ids: Vec<&str> = store.work_ids().collect();
        assert_eq!(ids, ["a", "b", "c"]);
    }
}
