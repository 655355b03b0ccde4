//! Macro-averaged F1 and confusion matrices over the label alphabets.

use crate::error::{Error, Result};
use crate::problems::{Property, PropertyLabels};

/// Per-class F1 scores in alphabet order. A class with zero predicted and zero
/// true positives scores 0. Classes absent from the truth yield `None`.
pub fn per_class_f1(
    predictions: &[PropertyLabels],
    truth: &[PropertyLabels],
    property: Property,
) -> Result<Vec<Option<f64>>> {
    if predictions.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: predictions.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptySplit("metric input".to_string()));
    }
    let classes = property.class_count();
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fn_ = vec![0usize; classes];
    for (p, t) in predictions.iter().zip(truth) {
        let pc = p.class_index(property);
        let tc = t.class_index(property);
        if pc == tc {
            tp[pc] += 1;
        } else {
            fp[pc] += 1;
            fn_[tc] += 1;
        }
    }
    Ok((0..classes)
        .map(|c| {
            let truth_count = tp[c] + fn_[c];
            if truth_count == 0 {
                return None;
            }
            let precision = if tp[c] + fp[c] > 0 {
                tp[c] as f64 / (tp[c] + fp[c]) as f64
            } else {
                0.0
            };
            let recall = tp[c] as f64 / truth_count as f64;
            Some(if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            })
        })
        .collect())
}

/// Unweighted mean of the per-class F1 over the classes present in the truth.
pub fn macro_f1(
    predictions: &[PropertyLabels],
    truth: &[PropertyLabels],
    property: Property,
) -> Result<f64> {
    let scores = per_class_f1(predictions, truth, property)?;
    let present: Vec<f64> = scores.into_iter().flatten().collect();
    Ok(present.iter().sum::<f64>() / present.len() as f64)
}

/// Confusion counts over the full alphabet; rows are truth classes, columns
/// predictions, so row sums equal the per-class truth counts.
pub fn confusion_matrix(
    predictions: &[PropertyLabels],
    truth: &[PropertyLabels],
    property: Property,
) -> Vec<Vec<usize>> {
    let classes = property.class_count();
    let mut matrix = vec![vec![0usize; classes]; classes];
    for (p, t) in predictions.iter().zip(truth) {
        matrix[t.class_index(property)][p.class_index(property)] += 1;
    }
    matrix
}
