//! Contested pairs from copyright rulings, per-class statistics, and the
//! three threshold bands used to classify a metric value.
//!
//! Bands, with defaults `safe_max = 0.6` and `fair_use_max = 0.7`:
//!
//! | verdict              | metric                          |
//! |----------------------|---------------------------------|
//! | copyright safe       | `m <= safe_max`                 |
//! | likely fair use      | `safe_max < m <= fair_use_max`  |
//! | likely infringement  | `fair_use_max < m`              |
//!
//! Boundaries belong to the lower band.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::embedding::EmbeddingStore;
use crate::metric::{clip_metric, MetricError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RulingsError {
    #[error("unknown ruling label {0:?}")]
    UnknownLabel(String),
    #[error("pair {0}: original and derivative are the same work")]
    SelfPair(String),
    #[error("pair {case_id}: reported metric {value} outside [-1, 1]")]
    ReportedOutOfRange { case_id: String, value: f64 },
    #[error("pair {0} has no reported metric")]
    MissingReportedMetric(String),
    #[error("{pairs} pairs but {values} values")]
    LengthMismatch { pairs: usize, values: usize },
    #[error("no values to evaluate")]
    Empty,
    #[error("metric value {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("thresholds need safe_max < fair_use_max within [-1, 1], got ({0}, {1})")]
    InvalidThresholds(f64, f64),
    #[error("calibration needs distinct fair-use and not-fair-use classes")]
    InsufficientClasses,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RulingLabel {
    FairUse,
    NotFairUse,
    ProbablyNotFairUse,
    Uncontested,
}

impl RulingLabel {
    pub const ALL: [RulingLabel; 4] = [
        RulingLabel::FairUse,
        RulingLabel::NotFairUse,
        RulingLabel::ProbablyNotFairUse,
        RulingLabel::Uncontested,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RulingLabel::FairUse => "fair_use",
            RulingLabel::NotFairUse => "not_fair_use",
            RulingLabel::ProbablyNotFairUse => "probably_not_fair_use",
            RulingLabel::Uncontested => "uncontested",
        }
    }

    /// Whether a court actually opposed the two works.
    pub fn is_contested(self) -> bool {
        self != RulingLabel::Uncontested
    }
}

impl fmt::Display for RulingLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RulingLabel {
    type Err = RulingsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RulingLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| RulingsError::UnknownLabel(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasePair {
    pub case_id: String,
    pub case_name: String,
    pub original_id: String,
    pub derivative_id: String,
    pub label: RulingLabel,
    pub reported_metric: Option<f64>,
    pub year: Option<i32>,
    pub notes: Option<String>,
}

impl CasePair {
    pub fn validate(&self) -> Result<(), RulingsError> {
        if self.original_id == self.derivative_id {
            return Err(RulingsError::SelfPair(self.case_id.clone()));
        }
        if let Some(value) = self.reported_metric {
            if !(-1.0..=1.0).contains(&value) {
                return Err(RulingsError::ReportedOutOfRange {
                    case_id: self.case_id.clone(),
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Where the scalar for a pair comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSource {
    /// The published per-pair value carried in the rulings dataset.
    Stored,
    /// Cosine similarity recomputed from the embedding store.
    Computed,
}

pub fn metric_for_pair(
    pair: &CasePair,
    store: &EmbeddingStore,
    source: MetricSource,
) -> Result<f64, RulingsError> {
    match source {
        MetricSource::Stored => pair
            .reported_metric
            .ok_or_else(|| RulingsError::MissingReportedMetric(pair.case_id.clone())),
        MetricSource::Computed => {
            let a = store.get(&pair.original_id).map_err(MetricError::from)?;
            let b = store.get(&pair.derivative_id).map_err(MetricError::from)?;
            Ok(clip_metric(a, b)?.value())
        }
    }
}

/// Every unordered pair of works in `store` that is not one of `contested`,
/// labelled [`RulingLabel::Uncontested`]. Ids are sorted within and across
/// pairs.
pub fn uncontested_pairs(store: &EmbeddingStore, contested: &[CasePair]) -> Vec<CasePair> {
    let litigated: BTreeSet<(&str, &str)> = contested
        .iter()
        .map(|p| ordered(&p.original_id, &p.derivative_id))
        .collect();
    let ids: Vec<&str> = store.work_ids().collect();
    let mut out = Vec::new();
    for (i, a) in ids.iter().enumerate() {
        for b in &ids[i + 1..] {
            if litigated.contains(&(*a, *b)) {
                continue;
            }
            out.push(CasePair {
                case_id: alloc::format!("{a}~{b}"),
                case_name: String::new(),
                original_id: String::from(*a),
                derivative_id: String::from(*b),
                label: RulingLabel::Uncontested,
                reported_metric: None,
                year: None,
                notes: None,
            });
        }
    }
    out
}

fn ordered<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub label: RulingLabel,
    pub count: usize,
    pub mean: f64,
    /// Sample (n - 1) standard deviation; `None` below two values.
    pub std_dev: Option<f64>,
}

fn check_lengths(pairs: &[CasePair], values: &[f64]) -> Result<(), RulingsError> {
    if pairs.len() != values.len() {
        return Err(RulingsError::LengthMismatch {
            pairs: pairs.len(),
            values: values.len(),
        });
    }
    Ok(())
}

fn group(pairs: &[CasePair], values: &[f64]) -> BTreeMap<RulingLabel, Vec<f64>> {
    let mut by_label: BTreeMap<RulingLabel, Vec<f64>> = BTreeMap::new();
    for (p, v) in pairs.iter().zip(values) {
        by_label.entry(p.label).or_default().push(*v);
    }
    by_label
}

pub fn mean_and_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std_dev = (values.len() >= 2).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        libm::sqrt(ss / (n - 1.0))
    });
    (mean, std_dev)
}

/// Count, mean and sample standard deviation per label present, in label
/// order.
pub fn class_stats(pairs: &[CasePair], values: &[f64]) -> Result<Vec<ClassStats>, RulingsError> {
    check_lengths(pairs, values)?;
    Ok(group(pairs, values)
        .into_iter()
        .map(|(label, vs)| {
            let (mean, std_dev) = mean_and_std(&vs);
            ClassStats {
                label,
                count: vs.len(),
                mean,
                std_dev,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    CopyrightSafe,
    LikelyFairUse,
    LikelyInfringement,
}

impl Verdict {
    pub const ALL: [Verdict; 3] = [
        Verdict::CopyrightSafe,
        Verdict::LikelyFairUse,
        Verdict::LikelyInfringement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CopyrightSafe => "copyright_safe",
            Verdict::LikelyFairUse => "likely_fair_use",
            Verdict::LikelyInfringement => "likely_infringement",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    safe_max: f64,
    fair_use_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            safe_max: 0.6,
            fair_use_max: 0.7,
        }
    }
}

impl Thresholds {
    pub fn new(safe_max: f64, fair_use_max: f64) -> Result<Self, RulingsError> {
        if !(-1.0 <= safe_max && safe_max < fair_use_max && fair_use_max <= 1.0) {
            return Err(RulingsError::InvalidThresholds(safe_max, fair_use_max));
        }
        Ok(Self {
            safe_max,
            fair_use_max,
        })
    }

    pub fn safe_max(&self) -> f64 {
        self.safe_max
    }

    pub fn fair_use_max(&self) -> f64 {
        self.fair_use_max
    }
}

pub fn classify(value: f64, t: &Thresholds) -> Result<Verdict, RulingsError> {
    if !(-1.0..=1.0).contains(&value) {
        return Err(RulingsError::OutOfRange(value));
    }
    Ok(if value <= t.safe_max {
        Verdict::CopyrightSafe
    } else if value <= t.fair_use_max {
        Verdict::LikelyFairUse
    } else {
        Verdict::LikelyInfringement
    })
}

/// Calibrated bands together with the class means they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub thresholds: Thresholds,
    pub fair_use_mean: f64,
    pub not_fair_use_mean: f64,
    pub uncontested_mean: Option<f64>,
}

fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

/// Places `fair_use_max` halfway between the fair-use and not-fair-use class
/// means, and `safe_max` halfway between the uncontested mean and the
/// fair-use mean, both rounded to two decimals.
///
/// Without uncontested values `safe_max` mirrors `fair_use_max` around the
/// fair-use mean. If rounding collapses the two bounds, `safe_max` drops by
/// one hundredth.
pub fn calibrate(pairs: &[CasePair], values: &[f64]) -> Result<Calibration, RulingsError> {
    check_lengths(pairs, values)?;
    let groups = group(pairs, values);
    let mean_of = |label| groups.get(&label).map(|vs: &Vec<f64>| mean_and_std(vs).0);
    let (Some(fu), Some(nfu)) = (
        mean_of(RulingLabel::FairUse),
        mean_of(RulingLabel::NotFairUse),
    ) else {
        return Err(RulingsError::InsufficientClasses);
    };
    if fu == nfu {
        return Err(RulingsError::InsufficientClasses);
    }
    let uncontested = mean_of(RulingLabel::Uncontested);

    let upper = (fu + nfu) / 2.0;
    let lower = match uncontested {
        Some(u) => (u + fu) / 2.0,
        None => fu - (upper - fu).abs(),
    };
    let fair_use_max = round2(upper).clamp(-0.99, 1.0);
    let mut safe_max = round2(lower).clamp(-1.0, 1.0);
    if safe_max >= fair_use_max {
        safe_max = round2(fair_use_max - 0.01);
    }
    Ok(Calibration {
        thresholds: Thresholds::new(safe_max, fair_use_max)?,
        fair_use_mean: fu,
        not_fair_use_mean: nfu,
        uncontested_mean: uncontested,
    })
}

/// Verdict counts per label plus accuracy over contested pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub counts: BTreeMap<RulingLabel, [usize; 3]>,
    pub correct: usize,
    pub contested: usize,
}

impl Evaluation {
    pub fn count(&self, label: RulingLabel, verdict: Verdict) -> usize {
        self.counts.get(&label).map_or(0, |c| c[verdict as usize])
    }

    /// `None` when there were no contested pairs.
    pub fn accuracy(&self) -> Option<f64> {
        (self.contested > 0).then(|| self.correct as f64 / self.contested as f64)
    }
}

/// Whether a verdict agrees with a ruling. Fair use is consistent with
/// either non-infringing band; both infringing labels need
/// `LikelyInfringement`. Uncontested pairs have no ruling to agree with.
pub fn is_consistent(label: RulingLabel, verdict: Verdict) -> Option<bool> {
    match label {
        RulingLabel::FairUse => Some(verdict != Verdict::LikelyInfringement),
        RulingLabel::NotFairUse | RulingLabel::ProbablyNotFairUse => {
            Some(verdict == Verdict::LikelyInfringement)
        }
        RulingLabel::Uncontested => None,
    }
}

pub fn evaluate(
    pairs: &[CasePair],
    values: &[f64],
    t: &Thresholds,
) -> Result<Evaluation, RulingsError> {
    check_lengths(pairs, values)?;
    if pairs.is_empty() {
        return Err(RulingsError::Empty);
    }
    let mut eval = Evaluation {
        counts: BTreeMap::new(),
        correct: 0,
        contested: 0,
    };
    for (pair, value) in pairs.iter().zip(values) {
        let verdict = classify(*value, t)?;
        eval.counts.entry(pair.label).or_insert([0; 3])[verdict as usize] += 1;
        if let Some(ok) = is_consistent(pair.label, verdict) {
            eval.contested += 1;
            eval.correct += usize::from(ok);
        }
    }
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingRecord;
    use alloc::vec;
    use proptest::prelude::*;

    fn pair(id: &str, label: RulingLabel, metric: Option<f64>) -> CasePair {
        CasePair {
            case_id: id.into(),
            case_name: id.into(),
            original_id: alloc::format!("{id}_o"),
            derivative_id: alloc::format!("{id}_d"),
            label,
            reported_metric: metric,
            year: None,
            notes: None,
        }
    }

    #[test]
    fn labels_round_trip_and_reject_unknown() {
        for l in RulingLabel::ALL {
            assert_eq!(l.as_str().parse::<RulingLabel>().unwrap(), l);
        }
        assert_eq!(
            "maybe".parse::<RulingLabel>(),
            Err(RulingsError::UnknownLabel("maybe".into()))
        );
    }

    #[test]
    fn pair_validation() {
        let mut p = pair("a", RulingLabel::FairUse, Some(1.2));
        assert!(matches!(
            p.validate(),
            Err(RulingsError::ReportedOutOfRange { .. })
        ));
        p.reported_metric = None;
        assert!(p.validate().is_ok());
        p.derivative_id = p.original_id.clone();
        assert!(matches!(p.validate(), Err(RulingsError::SelfPair(_))));
    }

    #[test]
    fn stored_and_computed_sources() {
        let store = EmbeddingStore::from_records([
            EmbeddingRecord::new("w_o", "m", 2, vec![1.0, 0.0]).unwrap(),
            EmbeddingRecord::new("w_d", "m", 2, vec![1.0, 1.0]).unwrap(),
        ])
        .unwrap();
        let warhol = pair("w", RulingLabel::NotFairUse, Some(0.852));
        assert_eq!(
            metric_for_pair(&warhol, &store, MetricSource::Stored),
            Ok(0.852)
        );
        let computed = metric_for_pair(&warhol, &store, MetricSource::Computed).unwrap();
        assert!((computed - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let bare = pair("b", RulingLabel::FairUse, None);
        assert_eq!(
            metric_for_pair(&bare, &store, MetricSource::Stored),
            Err(RulingsError::MissingReportedMetric("b".into()))
        );
        assert!(matches!(
            metric_for_pair(&bare, &store, MetricSource::Computed),
            Err(RulingsError::Metric(MetricError::Store(_)))
        ));
    }

    #[test]
    fn uncontested_excludes_litigated_pairs() {
        let store = EmbeddingStore::from_records(
            ["a", "b", "c"].map(|id| EmbeddingRecord::new(id, "m", 1, vec![1.0]).unwrap()),
        )
        .unwrap();
        let mut litigated = pair("x", RulingLabel::FairUse, None);
        litigated.original_id = "c".into();
        litigated.derivative_id = "a".into();
        let u = uncontested_pairs(&store, &[litigated]);
        let ids: Vec<_> = u.iter().map(|p| p.case_id.as_str()).collect();
        assert_eq!(ids, ["a~b", "b~c"]);
        assert!(u.iter().all(|p| p.label == RulingLabel::Uncontested));
    }

    #[test]
    fn stats_single_value_and_mismatch() {
        let s = class_stats(&[pair("a", RulingLabel::FairUse, None)], &[0.5]).unwrap();
        assert_eq!(
            s,
            vec![ClassStats {
                label: RulingLabel::FairUse,
                count: 1,
                mean: 0.5,
                std_dev: None
            }]
        );
        assert!(matches!(
            class_stats(&[pair("a", RulingLabel::FairUse, None)], &[]),
            Err(RulingsError::LengthMismatch { .. })
        ));
        assert_eq!(class_stats(&[], &[]).unwrap(), vec![]);
    }

    #[test]
    fn stats_match_hand_computation() {
        // mean 0.5, deviations -0.1, 0, 0.1 -> sample var 0.01
        let pairs = vec![
            pair("a", RulingLabel::FairUse, None),
            pair("b", RulingLabel::FairUse, None),
            pair("c", RulingLabel::FairUse, None),
            pair("d", RulingLabel::NotFairUse, None),
        ];
        let s = class_stats(&pairs, &[0.4, 0.5, 0.6, 0.9]).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[0].mean - 0.5).abs() < 1e-15);
        assert!((s[0].std_dev.unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(s[1].count, 1);
    }

    #[test]
    fn table_bands() {
        let t = Thresholds::default();
        assert_eq!(classify(0.479, &t), Ok(Verdict::CopyrightSafe));
        assert_eq!(classify(0.6, &t), Ok(Verdict::CopyrightSafe));
        assert_eq!(classify(0.65, &t), Ok(Verdict::LikelyFairUse));
        assert_eq!(classify(0.7, &t), Ok(Verdict::LikelyFairUse));
        assert_eq!(classify(0.723, &t), Ok(Verdict::LikelyInfringement));
        assert_eq!(classify(1.0, &t), Ok(Verdict::LikelyInfringement));
        assert_eq!(classify(-1.0, &t), Ok(Verdict::CopyrightSafe));
        assert_eq!(classify(1.01, &t), Err(RulingsError::OutOfRange(1.01)));
        assert!(classify(f64::NAN, &t).is_err());
        assert!(Thresholds::new(0.7, 0.6).is_err());
        assert!(Thresholds::new(0.6, 0.6).is_err());
        assert!(Thresholds::new(-1.5, 0.6).is_err());
    }

    #[test]
    fn calibrate_midpoints() {
        let pairs = vec![
            pair("a", RulingLabel::FairUse, None),
            pair("b", RulingLabel::NotFairUse, None),
            pair("c", RulingLabel::Uncontested, None),
        ];
        // (0.604 + 0.764) / 2 = 0.684 -> 0.68; (0.5 + 0.604) / 2 = 0.552 -> 0.55
        let c = calibrate(&pairs, &[0.604, 0.764, 0.5]).unwrap();
        assert_eq!(c.thresholds.fair_use_max(), 0.68);
        assert_eq!(c.thresholds.safe_max(), 0.55);
        assert_eq!(c.uncontested_mean, Some(0.5));

        let c = calibrate(&pairs[..2], &[0.604, 0.764]).unwrap();
        // mirrored: 0.604 - 0.08 = 0.524 -> 0.52
        assert_eq!(c.thresholds.safe_max(), 0.52);

        assert_eq!(
            calibrate(&pairs[..2], &[0.6, 0.6]),
            Err(RulingsError::InsufficientClasses)
        );
        assert_eq!(
            calibrate(&pairs[..1], &[0.6]),
            Err(RulingsError::InsufficientClasses)
        );
    }

    #[test]
    fn evaluate_counts_and_accuracy() {
        let pairs = vec![
            pair("kienitz", RulingLabel::FairUse, Some(0.479)),
            pair("cariou", RulingLabel::ProbablyNotFairUse, Some(0.776)),
            pair("seuss", RulingLabel::NotFairUse, Some(0.723)),
            pair("warhol", RulingLabel::NotFairUse, Some(0.852)),
        ];
        let values: Vec<f64> = pairs.iter().map(|p| p.reported_metric.unwrap()).collect();
        let e = evaluate(&pairs, &values, &Thresholds::default()).unwrap();
        assert_eq!((e.correct, e.contested), (4, 4));
        assert_eq!(e.accuracy(), Some(1.0));
        assert_eq!(
            e.count(RulingLabel::NotFairUse, Verdict::LikelyInfringement),
            2
        );

        let zeros = vec![0.0; 4];
        let e = evaluate(&pairs, &zeros, &Thresholds::default()).unwrap();
        assert_eq!(e.count(RulingLabel::FairUse, Verdict::CopyrightSafe), 1);
        assert_eq!(e.count(RulingLabel::NotFairUse, Verdict::CopyrightSafe), 2);
        assert_eq!(
            e.count(RulingLabel::ProbablyNotFairUse, Verdict::CopyrightSafe),
            1
        );
        assert_eq!(e.correct, 1);

        assert_eq!(
            evaluate(&[], &[], &Thresholds::default()),
            Err(RulingsError::Empty)
        );
        assert!(matches!(
            evaluate(&pairs, &[0.1], &Thresholds::default()),
            Err(RulingsError::LengthMismatch { .. })
        ));
    }

    fn thresholds() -> impl Strategy<Value = Thresholds> {
        (-1.0f64..1.0, 0.0f64..1.0).prop_filter_map("ordered", |(a, gap)| {
            let b = (a + gap * (1.0 - a)).min(1.0);
            Thresholds::new(a, b).ok()
        })
    }

    proptest! {
        #[test]
        fn classify_is_total_and_monotone(
            v1 in -1.0f64..=1.0,
            v2 in -1.0f64..=1.0,
            t in thresholds(),
        ) {
            let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            prop_assert!(classify(lo, &t).unwrap() <= classify(hi, &t).unwrap());
            prop_assert_eq!(classify(t.safe_max(), &t).unwrap(), Verdict::CopyrightSafe);
            prop_assert_eq!(classify(t.fair_use_max(), &t).unwrap(), Verdict::LikelyFairUse);
        }

        #[test]
        fn class_mean_within_range_and_order_free(
            mut vs in prop::collection::vec(-1.0f64..=1.0, 2..20),
        ) {
            let pairs: Vec<_> = (0..vs.len())
                .map(|i| pair(&alloc::format!("p{i}"), RulingLabel::FairUse, None))
                .collect();
            let s = class_stats(&pairs, &vs).unwrap().remove(0);
            let min = vs.iter().copied().fold(f64::INFINITY, f64::min);
            let max = vs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(s.mean >= min - 1e-12 && s.mean <= max + 1e-12);
            vs.reverse();
            let r = class_stats(&pairs, &vs).unwrap().remove(0);
            prop_assert!((r.std_dev.unwrap() - s.std_dev.unwrap()).abs() < 1e-12);
            prop_assert!(s.std_dev.unwrap() >= 0.0);
        }

        #[test]
        fn calibrate_yields_valid_thresholds(
            fu in -0.9f64..0.9,
            nfu in -0.9f64..0.9,
            un in proptest::option::of(-1.0f64..1.0),
        ) {
            prop_assume!(fu != nfu);
            let mut pairs = vec![
                pair("a", RulingLabel::FairUse, None),
                pair("b", RulingLabel::NotFairUse, None),
            ];
            let mut values = vec![fu, nfu];
            if let Some(u) = un {
                pairs.push(pair("c", RulingLabel::Uncontested, None));
                values.push(u);
            }
            let c = calibrate(&pairs, &values).unwrap();
            let t = c.thresholds;
            prop_assert!(-1.0 <= t.safe_max() && t.safe_max() < t.fair_use_max() && t.fair_use_max() <= 1.0);
        }
    }
}
