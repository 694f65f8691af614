//! The "CLIP metric": cosine similarity between two works' embeddings.
//!
//! Despite being called a distance in much of the literature around it, the
//! value is a similarity. Higher means more alike: infringing pairs sit around
//! 0.76, fair-use pairs around 0.60 and unrelated works around 0.5. Every
//! threshold in [`crate::rulings`] follows the same orientation.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::embedding::{EmbeddingRecord, EmbeddingStore, StoreError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("embedding model mismatch")]
    ModelMismatch,
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Cosine similarity in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MetricValue(f64);

impl MetricValue {
    /// Clamps into `[-1, 1]`; rounding can push a dot product of unit
    /// vectors a few ulps past either end.
    pub fn new(value: f64) -> Self {
        Self(value.clamp(-1.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}", self.0)
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Scales `v` to unit Euclidean length.
pub fn unit_normalize(v: &[f64]) -> Result<Vec<f64>, MetricError> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(MetricError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / n).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Cosine similarity of two raw vectors. Both are re-normalized regardless
/// of what the producer claims about their norm.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<MetricValue, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::DimensionMismatch(a.len(), b.len()));
    }
    let a = unit_normalize(a)?;
    let b = unit_normalize(b)?;
    Ok(MetricValue::new(dot(&a, &b)))
}

pub fn clip_metric(a: &EmbeddingRecord, b: &EmbeddingRecord) -> Result<MetricValue, MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.model_id() != b.model_id() {
        return Err(MetricError::ModelMismatch);
    }
    cosine(a.vector(), b.vector())
}

/// Dense symmetric matrix of metric values, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Metric between every pair of `ids`, in the order given.
pub fn pairwise_matrix<S: AsRef<str>>(
    store: &EmbeddingStore,
    ids: &[S],
) -> Result<SimilarityMatrix, MetricError> {
    let records = ids
        .iter()
        .map(|id| store.get(id.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    let n = records.len();
    let mut values = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let m = clip_metric(records[i], records[j])?.value();
            values[i * n + j] = m;
            values[j * n + i] = m;
        }
    }
    Ok(SimilarityMatrix { n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn rec(id: &str, v: Vec<f64>) -> EmbeddingRecord {
        EmbeddingRecord::new(id, "m", v.len(), v).unwrap()
    }

    #[test]
    fn normalize_three_four_five() {
        let u = unit_normalize(&[3.0, 4.0]).unwrap();
        assert!((u[0] - 0.6).abs() < 1e-15);
        assert!((u[1] - 0.8).abs() < 1e-15);
        let again = unit_normalize(&u).unwrap();
        assert!((again[0] - u[0]).abs() < 1e-15 && (again[1] - u[1]).abs() < 1e-15);
        assert_eq!(unit_normalize(&[0.0, 0.0]), Err(MetricError::ZeroVector));
    }

    #[test]
    fn identical_and_orthogonal() {
        let a = rec("a", vec![0.2, -0.7, 1.3]);
        assert!((clip_metric(&a, &a).unwrap().value() - 1.0).abs() < 1e-9);
        let x = rec("x", vec![1.0, 0.0]);
        let y = rec("y", vec![0.0, 1.0]);
        assert_eq!(clip_metric(&x, &y).unwrap().value(), 0.0);
    }

    #[test]
    fn rejects_mismatches() {
        let a = rec("a", vec![1.0, 0.0]);
        let b = rec("b", vec![1.0, 0.0, 0.0]);
        assert_eq!(
            clip_metric(&a, &b),
            Err(MetricError::DimensionMismatch(2, 3))
        );
        let c = EmbeddingRecord::new("c", "other", 2, vec![1.0, 0.0]).unwrap();
        assert_eq!(clip_metric(&a, &c), Err(MetricError::ModelMismatch));
        let z = rec("z", vec![0.0, 0.0]);
        assert_eq!(clip_metric(&a, &z), Err(MetricError::ZeroVector));
    }

    #[test]
    fn pairwise_small_cases() {
        let store = EmbeddingStore::from_records([
            rec("a", vec![1.0, 2.0]),
            rec("b", vec![1.0, 2.0]),
            rec("c", vec![1.0, 2.0]),
        ])
        .unwrap();
        let m = pairwise_matrix(&store, &["a", "b", "c"]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - 1.0).abs() < 1e-12);
            }
        }
        let store =
            EmbeddingStore::from_records([rec("x", vec![1.0, 0.0]), rec("y", vec![0.0, 1.0])])
                .unwrap();
        let m = pairwise_matrix(&store, &["x", "y"]).unwrap();
        assert_eq!(m.row(0), &[1.0, 0.0]);
        assert_eq!(m.row(1), &[0.0, 1.0]);
        assert!(matches!(
            pairwise_matrix(&store, &["x", "nope"]),
            Err(MetricError::Store(StoreError::UnknownWorkId(_)))
        ));
    }

    fn vec_strategy(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, dim)
            .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
    }

    proptest! {
        #[test]
        fn symmetric_bounded_and_scale_invariant(
            a in vec_strategy(8),
            b in vec_strategy(8),
            k in 1e-3f64..1e3,
        ) {
            let ab = cosine(&a, &b).unwrap().value();
            let ba = cosine(&b, &a).unwrap().value();
            prop_assert_eq!(ab, ba);
            prop_assert!((-1.0..=1.0).contains(&ab));
            let scaled: Vec<f64> = a.iter().map(|x| x * k).collect();
            prop_assert!((cosine(&scaled, &b).unwrap().value() - ab).abs() < 1e-9);
            prop_assert!((cosine(&a, &a).unwrap().value() - 1.0).abs() < 1e-9);
        }

        #[test]
        fn pairwise_entries_match_direct_metric(
            vs in prop::collection::vec(vec_strategy(4), 1..6),
        ) {
            let recs: Vec<EmbeddingRecord> = vs
                .iter()
                .enumerate()
                .map(|(i, v)| rec(&alloc::format!("w{i}"), v.clone()))
                .collect();
            let ids: Vec<&str> = recs.iter().map(|r| r.work_id()).collect();
            let store = EmbeddingStore::from_records(recs.clone()).unwrap();
            let m = pairwise_matrix(&store, &ids).unwrap();
            for i in 0..recs.len() {
                for j in 0..recs.len() {
                    prop_assert_eq!(m.get(i, j), clip_metric(&recs[i], &recs[j]).unwrap().value());
                    prop_assert!((m.get(i, j) - m.get(j, i)).abs() <= 1e-12);
                }
            }
        }
    }
}
