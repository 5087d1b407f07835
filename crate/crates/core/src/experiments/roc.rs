//! ROC curves with entropy as the score: higher entropy means "more noisy".

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RocResult {
    pub auc: f64,
    /// `(false positive rate, true positive rate)` from `(0, 0)` to `(1, 1)`.
    pub points: Vec<(f64, f64)>,
    pub run: Option<usize>,
}

/// Sweeps the threshold `T` down through every observed score; an observation is
/// classified as noisy when its score is `>= T`. Area by the trapezoid rule.
pub fn roc_auc(noisy: &[f64], quiet: &[f64]) -> Result<RocResult> {
    if noisy.is_empty() || quiet.is_empty() {
        return Err(Error::InvalidParameter(
            "ROC needs non-empty score sets".into(),
        ));
    }
    if noisy.iter().chain(quiet).any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("ROC scores must be finite".into()));
    }
    let mut pos = noisy.to_vec();
    let mut neg = quiet.to_vec();
    pos.sort_by(|a, b| b.total_cmp(a));
    neg.sort_by(|a, b| b.total_cmp(a));
    let mut thresholds: Vec<f64> = pos.iter().chain(&neg).copied().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let (np, nn) = (pos.len(), neg.len());
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut points = vec![(0.0, 0.0)];
    // twice the area in units of 1 / (np * nn); exact in integers
    let mut twice_area: u128 = 0;
    for t in thresholds {
        let (tp0, fp0) = (tp, fp);
        while tp < np && pos[tp] >= t {
            tp += 1;
        }
        while fp < nn && neg[fp] >= t {
            fp += 1;
        }
        twice_area += ((fp - fp0) * (tp0 + tp)) as u128;
        points.push((fp as f64 / nn as f64, tp as f64 / np as f64));
    }
    let area = twice_area as f64 / (2 * np * nn) as f64;
    Ok(RocResult {
        auc: area,
        points,
        run: None,
    })
}

/// Mann-Whitney form: fraction of (noisy, quiet) pairs ordered correctly, ties counting 1/2.
pub fn pairwise_auc(noisy: &[f64], quiet: &[f64]) -> f64 {
    let mut s = 0.0;
    for &a in noisy {
        for &b in quiet {
            s += if a > b {
                1.0
            } else if a == b {
                0.5
            } else {
                0.0
            };
        }
    }
    s / (noisy.len() * quiet.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(roc_auc(&[0.9, 0.8], &[0.85, 0.1]).unwrap().auc, 0.75);
        assert_eq!(roc_auc(&[3.0, 4.0], &[1.0, 2.0]).unwrap().auc, 1.0);
        assert_eq!(
            roc_auc(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap().auc,
            0.5
        );
        assert!(roc_auc(&[], &[1.0]).is_err());
    }

    #[test]
    fn curve_shape() {
        let r = roc_auc(&[0.9, 0.8], &[0.85, 0.1]).unwrap();
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        assert!(r
            .points
            .windows(2)
            .all(|p| p[0].0 <= p[1].0 && p[0].1 <= p[1].1));
    }

    #[test]
    fn matches_pairwise_with_ties() {
        let a = [0.5, 0.5, 0.7, 0.1, 0.3, 0.3];
        let b = [0.3, 0.5, 0.2, 0.9, 0.5];
        let r = roc_auc(&a, &b).unwrap().auc;
        assert!((r - pairwise_auc(&a, &b)).abs() < 1e-12);
    }
}
