//! Fixed-width binning of labelled metric values for external plotting.

use alloc::vec::Vec;

use thiserror::Error;

use crate::rulings::RulingLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HistogramError {
    #[error("bin width must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error("value {0} is not finite")]
    NonFinite(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub start: f64,
    pub end: f64,
    /// Indexed like [`RulingLabel::ALL`].
    pub counts: [usize; 4],
}

/// Bins aligned to multiples of `width`, spanning the smallest to the largest
/// value. A value sitting exactly on an edge goes to the bin that starts
/// there. Empty input yields no bins.
pub fn histogram(values: &[(RulingLabel, f64)], width: f64) -> Result<Vec<Bin>, HistogramError> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(HistogramError::InvalidWidth(width));
    }
    if let Some((_, v)) = values.iter().find(|(_, v)| !v.is_finite()) {
        return Err(HistogramError::NonFinite(*v));
    }
    // Snap values that sit within rounding error of an edge onto it.
    let index = |v: f64| libm::floor(v / width + 1e-9) as i64;
    let Some(lo) = values.iter().map(|(_, v)| index(*v)).min() else {
        return Ok(Vec::new());
    };
    let hi = values.iter().map(|(_, v)| index(*v)).max().unwrap_or(lo);

    let mut bins: Vec<Bin> = (lo..=hi)
        .map(|k| Bin {
            start: k as f64 * width,
            end: (k + 1) as f64 * width,
            counts: [0; 4],
        })
        .collect();
    for (label, v) in values {
        let slot = RulingLabel::ALL
            .iter()
            .position(|l| l == label)
            .unwrap_or(0);
        bins[(index(*v) - lo) as usize].counts[slot] += 1;
    }
    Ok(bins)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn single_value_single_bin() {
        let bins = histogram(&[(RulingLabel::FairUse, 0.479)], 0.05).unwrap();
        assert_eq!(bins.len(), 1);
        assert!((bins[0].start - 0.45).abs() < 1e-12);
        assert_eq!(bins[0].counts, [1, 0, 0, 0]);
    }

    #[test]
    fn edges_belong_to_upper_bin() {
        let values = vec![
            (RulingLabel::FairUse, 0.6),
            (RulingLabel::NotFairUse, 0.7),
            (RulingLabel::Uncontested, 0.65),
        ];
        let bins = histogram(&values, 0.05).unwrap();
        assert_eq!(bins.len(), 3);
        assert_eq!(bins[0].counts, [1, 0, 0, 0]);
        assert_eq!(bins[1].counts, [0, 0, 0, 1]);
        assert_eq!(bins[2].counts, [0, 1, 0, 0]);
        let total: usize = bins.iter().flat_map(|b| b.counts).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn bad_width_and_empty() {
        assert!(histogram(&[], 0.0).is_err());
        assert!(histogram(&[], -1.0).is_err());
        assert!(histogram(&[], f64::NAN).is_err());
        assert_eq!(histogram(&[], 0.1).unwrap(), vec![]);
        assert!(histogram(&[(RulingLabel::FairUse, f64::NAN)], 0.1).is_err());
    }
}
