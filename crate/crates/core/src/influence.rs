//! Attribution of generated outputs to training items.
//!
//! An influence row assigns every training item a weight in `[0, 1]` and the
//! weights of one output sum to one. Three providers produce such rows:
//!
//! - [`uniform_row`]: every item weighs the same
//! - [`similarity_influence`]: a softmax over embedding similarity to the output
//! - [`loo_influence`] followed by [`normalize_influence`]: exact
//!   leave-one-out retraining of a small ridge regression
//!
//! Gradient or Hessian based influence estimates on large networks are not
//! provided. At the scale handled here, retraining without each point is the
//! ground truth those estimates approximate.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::embedding::EmbeddingRecord;
use crate::linalg;
use crate::metric::{clip_metric, MetricError};

/// Tolerance on `sum(row) == 1`.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfluenceError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("temperature must be positive and finite, got {0}")]
    InvalidTemperature(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("ridge problem: {0}")]
    InvalidProblem(&'static str),
    #[error("ridge system is singular")]
    SingularSystem,
    #[error("influence row {row} has {found} weights, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0} output ids for {1} rows")]
    OutputCount(usize, usize),
    #[error("influence row {row} sums to {sum}")]
    RowSum { row: usize, sum: f64 },
    #[error("influence row {row} has weight {weight} outside [0, 1]")]
    WeightRange { row: usize, weight: f64 },
}

/// Per-output, per-training-item weights. `weights[j][i]` is the share of
/// output `j` attributed to training item `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    output_ids: Vec<String>,
    training_ids: Vec<String>,
    weights: Vec<Vec<f64>>,
}

impl InfluenceMatrix {
    /// Validates that every row has one weight per training item, every
    /// weight lies in `[0, 1]` and every row sums to one.
    pub fn new(
        output_ids: Vec<String>,
        training_ids: Vec<String>,
        weights: Vec<Vec<f64>>,
    ) -> Result<Self, InfluenceError> {
        if output_ids.len() != weights.len() {
            return Err(InfluenceError::OutputCount(output_ids.len(), weights.len()));
        }
        for (row, w) in weights.iter().enumerate() {
            check_row(row, w, training_ids.len())?;
        }
        Ok(Self {
            output_ids,
            training_ids,
            weights,
        })
    }

    pub fn uniform(
        output_ids: Vec<String>,
        training_ids: Vec<String>,
    ) -> Result<Self, InfluenceError> {
        let row = uniform_row(training_ids.len())?;
        let weights = output_ids.iter().map(|_| row.clone()).collect();
        Self::new(output_ids, training_ids, weights)
    }

    pub fn output_ids(&self) -> &[String] {
        &self.output_ids
    }

    pub fn training_ids(&self) -> &[String] {
        &self.training_ids
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn row_for(&self, output_id: &str) -> Option<&[f64]> {
        self.output_ids
            .iter()
            .position(|id| id == output_id)
            .map(|j| self.weights[j].as_slice())
    }
}

/// Checks the row-level invariants of an influence row.
pub fn check_row(row: usize, weights: &[f64], expected: usize) -> Result<(), InfluenceError> {
    if weights.len() != expected {
        return Err(InfluenceError::RowLength {
            row,
            expected,
            found: weights.len(),
        });
    }
    if let Some(&weight) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
        return Err(InfluenceError::WeightRange { row, weight });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(InfluenceError::RowSum { row, sum });
    }
    Ok(())
}

pub fn uniform_row(n_training: usize) -> Result<Vec<f64>, InfluenceError> {
    if n_training == 0 {
        return Err(InfluenceError::EmptyTrainingSet);
    }
    Ok(alloc::vec![1.0 / n_training as f64; n_training])
}

/// Softmax of `clip_metric(output, x_i) / temperature` over the training set.
///
/// The maximum is subtracted before exponentiating, so tiny temperatures
/// collapse onto the most similar items instead of overflowing.
pub fn similarity_influence(
    output: &EmbeddingRecord,
    training: &[EmbeddingRecord],
    temperature: f64,
) -> Result<Vec<f64>, InfluenceError> {
    if training.is_empty() {
        return Err(InfluenceError::EmptyTrainingSet);
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(InfluenceError::InvalidTemperature(temperature));
    }
    let sims = training
        .iter()
        .map(|x| clip_metric(output, x).map(|m| m.value()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(softmax(&sims, temperature))
}

fn softmax(scores: &[f64], temperature: f64) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores
        .iter()
        .map(|s| libm::exp((s - max) / temperature))
        .collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Maps signed scores onto the probability simplex.
///
/// Scores are shifted up by the most negative one (if any), then divided by
/// their sum. Ordering among harmful points survives the shift, which
/// clamping at zero would lose. All-zero input falls back to uniform.
pub fn normalize_influence(raw: &[f64]) -> Vec<f64> {
    if raw.is_empty() {
        return Vec::new();
    }
    let shift = raw.iter().copied().fold(0.0f64, f64::min);
    let shifted: Vec<f64> = raw.iter().map(|s| s - shift).collect();
    let total: f64 = shifted.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return alloc::vec![1.0 / raw.len() as f64; raw.len()];
    }
    shifted.into_iter().map(|s| s / total).collect()
}

/// Ridge regression without intercept plus one query point.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeProblem {
    design: Vec<Vec<f64>>,
    targets: Vec<f64>,
    regularizer: f64,
    query_input: Vec<f64>,
    query_target: f64,
}

impl RidgeProblem {
    pub fn new(
        design: Vec<Vec<f64>>,
        targets: Vec<f64>,
        regularizer: f64,
        query_input: Vec<f64>,
        query_target: f64,
    ) -> Result<Self, InfluenceError> {
        use InfluenceError::InvalidProblem;
        if design.len() < 2 {
            return Err(InvalidProblem("need at least two training points"));
        }
        if targets.len() != design.len() {
            return Err(InvalidProblem("targets and design rows differ in length"));
        }
        let d = query_input.len();
        if d == 0 || design.iter().any(|row| row.len() != d) {
            return Err(InvalidProblem("every row must match the query width"));
        }
        if !(regularizer > 0.0 && regularizer.is_finite()) {
            return Err(InvalidProblem("regularizer must be positive and finite"));
        }
        let finite = design.iter().flatten().all(|x| x.is_finite())
            && targets.iter().all(|x| x.is_finite())
            && query_input.iter().all(|x| x.is_finite())
            && query_target.is_finite();
        if !finite {
            return Err(InvalidProblem("all inputs must be finite"));
        }
        Ok(Self {
            design,
            targets,
            regularizer,
            query_input,
            query_target,
        })
    }

    pub fn len(&self) -> usize {
        self.design.len()
    }

    pub fn is_empty(&self) -> bool {
        self.design.is_empty()
    }

    pub fn width(&self) -> usize {
        self.query_input.len()
    }

    pub fn design(&self) -> &[Vec<f64>] {
        &self.design
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn regularizer(&self) -> f64 {
        self.regularizer
    }

    pub fn query_input(&self) -> &[f64] {
        &self.query_input
    }

    pub fn query_target(&self) -> f64 {
        self.query_target
    }

    /// Solves `(X'X + lambda I) w = X'y` over every row except `skip`.
    pub fn fit(&self, skip: Option<usize>) -> Result<Vec<f64>, InfluenceError> {
        let d = self.width();
        let mut gram = alloc::vec![0.0; d * d];
        let mut rhs = alloc::vec![0.0; d];
        for (i, (x, y)) in self.design.iter().zip(&self.targets).enumerate() {
            if Some(i) == skip {
                continue;
            }
            for r in 0..d {
                rhs[r] += x[r] * y;
                for c in 0..d {
                    gram[r * d + c] += x[r] * x[c];
                }
            }
        }
        for k in 0..d {
            gram[k * d + k] += self.regularizer;
        }
        linalg::solve(gram, rhs).ok_or(InfluenceError::SingularSystem)
    }

    /// Squared error of `weights` on the query point.
    pub fn query_loss(&self, weights: &[f64]) -> f64 {
        let pred: f64 = weights
            .iter()
            .zip(&self.query_input)
            .map(|(w, x)| w * x)
            .sum();
        let err = pred - self.query_target;
        err * err
    }
}

/// Exact leave-one-out influence: for each training point, the query loss
/// after retraining without it minus the query loss of the full model.
/// Positive means the point helped the query.
pub fn loo_influence(problem: &RidgeProblem) -> Result<Vec<f64>, InfluenceError> {
    let full = problem.query_loss(&problem.fit(None)?);
    (0..problem.len())
        .map(|i| Ok(problem.query_loss(&problem.fit(Some(i))?) - full))
        .collect()
}
