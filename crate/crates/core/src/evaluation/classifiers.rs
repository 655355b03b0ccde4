//! Binary-Relevance model: three independent multiclass base classifiers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{Property, PropertyLabels};

/// Configuration of one base classifier, applied to all three properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseConfig {
    Knn {
        k: usize,
    },
    Logistic {
        learning_rate: f64,
        iterations: usize,
        l2: f64,
    },
}

impl BaseConfig {
    pub fn describe(&self) -> String {
        match self {
            BaseConfig::Knn { k } => format!("knn(k={k})"),
            BaseConfig::Logistic {
                learning_rate,
                iterations,
                l2,
            } => format!("logistic(lr={learning_rate}, iters={iterations}, l2={l2})"),
        }
    }
}

/// Per-column affine scaling fitted on the training split only.
#[derive(Debug, Clone)]
struct Standardizer {
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl Standardizer {
    fn fit(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let width = rows[0].len();
        let mut mean = vec![0.0; width];
        for row in rows {
            for (j, v) in row.iter().enumerate() {
                mean[j] += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut sd = vec![0.0; width];
        for row in rows {
            for (j, v) in row.iter().enumerate() {
                sd[j] += (v - mean[j]) * (v - mean[j]);
            }
        }
        for s in sd.iter_mut() {
            *s = (*s / n as f64).sqrt();
            if *s == 0.0 || !s.is_finite() {
                *s = 1.0;
            }
        }
        Standardizer { mean, sd }
    }

    fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| (v - self.mean[j]) / self.sd[j])
            .collect()
    }

    fn width(&self) -> usize {
        self.mean.len()
    }
}

#[derive(Debug, Clone)]
enum Classifier {
    Knn {
        k: usize,
        rows: Vec<Vec<f64>>,
        classes: Vec<usize>,
        class_count: usize,
    },
    Logistic {
        /// `class_count x (width + 1)` weights, bias first.
        weights: Vec<Vec<f64>>,
    },
}

impl Classifier {
    fn predict(&self, row: &[f64]) -> usize {
        match self {
            Classifier::Knn {
                k,
                rows,
                classes,
                class_count,
            } => {
                let mut dists: Vec<(f64, usize)> = rows
                    .iter()
                    .enumerate()
                    .map(|(i, train)| {
                        let d: f64 = train
                            .iter()
                            .zip(row)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum();
                        (d, i)
                    })
                    .collect();
                dists.sort_unstable_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .expect("finite distances")
                        .then(a.1.cmp(&b.1))
                });
                let mut votes = vec![0usize; *class_count];
                for &(_, i) in dists.iter().take(*k) {
                    votes[classes[i]] += 1;
                }
                // Most votes; ties resolve to the smallest class index.
                let mut winner = 0;
                for (c, &v) in votes.iter().enumerate() {
                    if v > votes[winner] {
                        winner = c;
                    }
                }
                winner
            }
            Classifier::Logistic { weights } => {
                let mut best = 0;
                let mut best_score = f64::NEG_INFINITY;
                for (c, w) in weights.iter().enumerate() {
                    let score = w[0]
                        + w[1..]
                            .iter()
                            .zip(row)
                            .map(|(wi, xi)| wi * xi)
                            .sum::<f64>();
                    if score > best_score {
                        best_score = score;
                        best = c;
                    }
                }
                best
            }
        }
    }
}

/// Binary-Relevance model: an independent classifier per property, sharing the
/// train-split standardization.
#[derive(Debug, Clone)]
pub struct BrModel {
    standardizer: Standardizer,
    classifiers: Vec<(Property, Classifier)>,
    pub config: BaseConfig,
}

/// Trains the three per-property classifiers. Deterministic: the logistic
/// weights start at zero and kNN stores the data as-is.
pub fn train_br(
    rows: &[Vec<f64>],
    labels: &[PropertyLabels],
    config: &BaseConfig,
) -> Result<BrModel> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    let standardizer = Standardizer::fit(rows);
    let standardized: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply(r)).collect();
    if standardized
        .iter()
        .any(|r| r.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFiniteInput);
    }

    let mut classifiers = Vec::with_capacity(Property::ALL.len());
    for property in Property::ALL {
        let classes: Vec<usize> = labels.iter().map(|l| l.class_index(property)).collect();
        let distinct = {
            let mut seen = vec![false; property.class_count()];
            for &c in &classes {
                seen[c] = true;
            }
            seen.iter().filter(|&&s| s).count()
        };
        if distinct < 2 {
            return Err(Error::DegenerateLabels(property.name().to_string()));
        }
        let classifier = match config {
            BaseConfig::Knn { k } => Classifier::Knn {
                k: (*k).min(standardized.len()),
                rows: standardized.clone(),
                classes,
                class_count: property.class_count(),
            },
            BaseConfig::Logistic {
                learning_rate,
                iterations,
                l2,
            } => Classifier::Logistic {
                weights: train_logistic(
                    &standardized,
                    &classes,
                    property.class_count(),
                    *learning_rate,
                    *iterations,
                    *l2,
                ),
            },
        };
        classifiers.push((property, classifier));
    }
    Ok(BrModel {
        standardizer,
        classifiers,
        config: *config,
    })
}

impl BrModel {
    /// Predicts a label triple per row.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<PropertyLabels>> {
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != self.standardizer.width() {
                return Err(Error::DimensionMismatch {
                    expected: self.standardizer.width(),
                    got: row.len(),
                });
            }
            let standardized = self.standardizer.apply(row);
            let mut indices = [0usize; 3];
            for (slot, (_, classifier)) in self.classifiers.iter().enumerate() {
                indices[slot] = classifier.predict(&standardized);
            }
            out.push(PropertyLabels::from_indices(
                indices[0], indices[1], indices[2],
            ));
        }
        Ok(out)
    }
}

/// Multinomial logistic regression by full-batch gradient descent from zero
/// initialization. The bias column is excluded from the L2 penalty.
fn train_logistic(
    rows: &[Vec<f64>],
    classes: &[usize],
    class_count: usize,
    learning_rate: f64,
    iterations: usize,
    l2: f64,
) -> Vec<Vec<f64>> {
    let n = rows.len();
    let width = rows[0].len();
    let mut weights = vec![vec![0.0; width + 1]; class_count];
    let mut scores = vec![0.0; class_count];
    let mut gradient = vec![vec![0.0; width + 1]; class_count];
    for _ in 0..iterations {
        for g in gradient.iter_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        for (row, &truth) in rows.iter().zip(classes) {
            for (c, w) in weights.iter().enumerate() {
                scores[c] = w[0]
                    + w[1..]
                        .iter()
                        .zip(row)
                        .map(|(wi, xi)| wi * xi)
                        .sum::<f64>();
            }
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for s in scores.iter_mut() {
                *s = (*s - max).exp();
                total += *s;
            }
            for (c, g) in gradient.iter_mut().enumerate() {
                let p = scores[c] / total;
                let err = p - if c == truth { 1.0 } else { 0.0 };
                g[0] += err;
                for (gi, xi) in g[1..].iter_mut().zip(row) {
                    *gi += err * xi;
                }
            }
        }
        for (w, g) in weights.iter_mut().zip(&gradient) {
            w[0] -= learning_rate * g[0] / n as f64;
            for j in 1..=width {
                w[j] -= learning_rate * (g[j] / n as f64 + l2 * w[j]);
            }
        }
    }
    weights
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Funnel, GlobalStructure, Multimodality};

    fn label(m: usize, g: usize, f: usize) -> PropertyLabels {
        PropertyLabels::from_indices(m, g, f)
    }

    fn toy_data() -> (Vec<Vec<f64>>, Vec<PropertyLabels>) {
        // Two well-separated blobs with distinct label triples.
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            rows.push(vec![0.0 + 0.01 * i as f64, 0.0]);
            labels.push(label(0, 0, 0));
            rows.push(vec![10.0 + 0.01 * i as f64, 10.0]);
            labels.push(label(3, 3, 1));
        }
        (rows, labels)
    }

    #[test]
    fn knn_memorizes_its_training_set() {
        let (rows, labels) = toy_data();
        let model = train_br(&rows, &labels, &BaseConfig::Knn { k: 1 }).unwrap();
        let predictions = model.predict(&rows).unwrap();
        assert_eq!(predictions, labels);
    }

    #[test]
    fn logistic_separates_blobs() {
        let (rows, labels) = toy_data();
        let config = BaseConfig::Logistic {
            learning_rate: 0.1,
            iterations: 500,
            l2: 0.0,
        };
        let model = train_br(&rows, &labels, &config).unwrap();
        let predictions = model.predict(&rows).unwrap();
        assert_eq!(predictions, labels, "separable blobs in 500 iterations");
    }

    #[test]
    fn zero_iteration_logistic_predicts_the_first_class() {
        let (rows, labels) = toy_data();
        let config = BaseConfig::Logistic {
            learning_rate: 0.1,
            iterations: 0,
            l2: 0.0,
        };
        let model = train_br(&rows, &labels, &config).unwrap();
        let predictions = model.predict(&rows).unwrap();
        for p in predictions {
            assert_eq!(p.multimodality, Multimodality::None);
            assert_eq!(p.global_structure, GlobalStructure::None);
            assert_eq!(p.funnel, Funnel::Yes);
        }
    }

    #[test]
    fn knn_vote_ties_resolve_to_the_smallest_class() {
        // k = 2 with one neighbor of each class: tie, so the lower index wins.
        let rows = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let labels = vec![label(0, 0, 0), label(3, 0, 0), label(0, 0, 0), label(3, 0, 0)];
        let model = train_br(&rows, &labels, &BaseConfig::Knn { k: 2 }).unwrap();
        let predictions = model.predict(&[vec![0.5]]).unwrap();
        assert_eq!(predictions[0].multimodality, Multimodality::None);
    }

    #[test]
    fn single_class_property_is_degenerate() {
        let rows = vec![vec![0.0], vec![1.0]];
        let labels = vec![label(0, 0, 0), label(1, 0, 0)];
        assert!(matches!(
            train_br(&rows, &labels, &BaseConfig::Knn { k: 1 }),
            Err(Error::DegenerateLabels(p)) if p == "global_structure"
        ));
    }

    #[test]
    fn predict_checks_row_arity() {
        let (rows, labels) = toy_data();
        let model = train_br(&rows, &labels, &BaseConfig::Knn { k: 1 }).unwrap();
        assert!(matches!(
            model.predict(&[vec![1.0, 2.0, 3.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        let batch = model.predict(&rows[..7]).unwrap();
        assert_eq!(batch.len(), 7);
    }

    #[test]
    fn properties_are_classified_independently() {
        // Same rows, funnel labels flipped: multimodality and global structure
        // predictions must not change.
        let (rows, labels) = toy_data();
        let mut flipped = labels.clone();
        for l in flipped.iter_mut() {
            let funnel = 1 - l.class_index(Property::Funnel);
            *l = PropertyLabels::from_indices(
                l.class_index(Property::Multimodality),
                l.class_index(Property::GlobalStructure),
                funnel,
            );
        }
        let a = train_br(&rows, &labels, &BaseConfig::Knn { k: 3 }).unwrap();
        let b = train_br(&rows, &flipped, &BaseConfig::Knn { k: 3 }).unwrap();
        let pa = a.predict(&rows).unwrap();
        let pb = b.predict(&rows).unwrap();
        for (x, y) in pa.iter().zip(pb.iter()) {
            assert_eq!(x.multimodality, y.multimodality);
            assert_eq!(x.global_structure, y.global_structure);
        }
    }
}
