//! Multilabel classification harness: one independent base classifier per
//! landscape property, trained on a flattened representation and scored with
//! the macro-averaged F1.

mod classifiers;
mod flatten;
mod metrics;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{load_protocol, DatasetManifest, LabeledMatrix, Representation};
use crate::error::{Error, Result};
use crate::problems::{Property, PropertyLabels};

pub use classifiers::{train_br, BaseConfig, BrModel};
pub use flatten::flatten_artifact;
pub use metrics::{confusion_matrix, macro_f1, per_class_f1};

/// Family of base classifiers used inside the Binary-Relevance model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Knn,
    Logistic,
}

impl BaseKind {
    pub fn name(self) -> &'static str {
        match self {
            BaseKind::Knn => "knn",
            BaseKind::Logistic => "logistic",
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(BaseKind::Knn),
            "logistic" => Ok(BaseKind::Logistic),
            _ => Err(Error::UnknownRepresentation(s.to_string())),
        }
    }
}

/// The fixed selection grid evaluated on the validation split.
pub fn default_grid(kind: BaseKind) -> Vec<BaseConfig> {
    match kind {
        BaseKind::Knn => vec![
            BaseConfig::Knn { k: 1 },
            BaseConfig::Knn { k: 5 },
            BaseConfig::Knn { k: 11 },
        ],
        BaseKind::Logistic => [0.0, 1e-3, 1e-1]
            .iter()
            .map(|&l2| BaseConfig::Logistic {
                learning_rate: 0.1,
                iterations: 500,
                l2,
            })
            .collect(),
    }
}

/// One line of the report: macro-F1 of a property, either for a single
/// dimensionality or pooled over the whole test split (`dim = None`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub property: Property,
    pub dim: Option<usize>,
    pub macro_f1: f64,
}

/// Test-split scores in the shape property x (dimension | "all"), plus the
/// pooled confusion matrix per property.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub representation: Representation,
    pub selected: BaseConfig,
    pub validation_score: f64,
    pub rows: Vec<ReportRow>,
    pub confusion: Vec<(Property, Vec<Vec<usize>>)>,
}

impl MetricsReport {
    pub fn score(&self, property: Property, dim: Option<usize>) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.property == property && r.dim == dim)
            .map(|r| r.macro_f1)
    }

    /// CSV with one row per (property, dimension) cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("property,dim,macro_f1\n");
        for row in &self.rows {
            let dim = row
                .dim
                .map(|d| d.to_string())
                .unwrap_or_else(|| "all".to_string());
            out.push_str(&format!("{},{},{}\n", row.property.name(), dim, row.macro_f1));
        }
        out
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "representation: {}   base: {}   validation macro-F1: {:.4}\n",
            self.representation,
            self.selected.describe(),
            self.validation_score
        ));
        out.push_str(&format!("{:<18} {:>5} {:>10}\n", "property", "dim", "macro_f1"));
        for row in &self.rows {
            let dim = row
                .dim
                .map(|d| d.to_string())
                .unwrap_or_else(|| "all".to_string());
            out.push_str(&format!(
                "{:<18} {:>5} {:>10.4}\n",
                row.property.name(),
                dim,
                row.macro_f1
            ));
        }
        for (property, matrix) in &self.confusion {
            out.push_str(&format!("\nconfusion ({}), rows = truth:\n", property.name()));
            out.push_str(&format!("{:<12}", ""));
            for c in 0..property.class_count() {
                out.push_str(&format!("{:>10}", property.class_name(c)));
            }
            out.push('\n');
            for (r, row) in matrix.iter().enumerate() {
                out.push_str(&format!("{:<12}", property.class_name(r)));
                for cell in row {
                    out.push_str(&format!("{cell:>10}"));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Runs the full protocol on a built dataset: train every grid configuration
/// on the training split, select by validation macro-F1 (mean over the three
/// properties), and report test macro-F1 per property and dimension.
pub fn evaluate_protocol(
    manifest: &DatasetManifest,
    root: &Path,
    kind: BaseKind,
) -> Result<MetricsReport> {
    let representation = manifest.config.representation;
    let data = load_protocol(manifest, root, |path| {
        flatten_artifact(representation, path)
    })?;
    for (matrix, split) in [
        (&data.train, "train"),
        (&data.validation, "validation"),
        (&data.test, "test"),
    ] {
        if matrix.is_empty() {
            return Err(Error::EmptySplit(split.to_string()));
        }
    }

    let mut best: Option<(f64, BrModel)> = None;
    for config in default_grid(kind) {
        let model = train_br(&data.train.rows, &data.train.labels, &config)?;
        let predictions = model.predict(&data.validation.rows)?;
        let mut total = 0.0;
        for property in Property::ALL {
            total += macro_f1(&predictions, &data.validation.labels, property)?;
        }
        let score = total / Property::ALL.len() as f64;
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, model));
        }
    }
    let (validation_score, model) = best.expect("non-empty grid");

    let test_predictions = model.predict(&data.test.rows)?;
    let mut rows = Vec::new();
    let mut dims: Vec<usize> = manifest.config.dims.clone();
    dims.sort_unstable();
    for property in Property::ALL {
        for &dim in &dims {
            let (pred, truth) = filter_dim(&test_predictions, &data.test, dim);
            if !pred.is_empty() {
                rows.push(ReportRow {
                    property,
                    dim: Some(dim),
                    macro_f1: macro_f1(&pred, &truth, property)?,
                });
            }
        }
        rows.push(ReportRow {
            property,
            dim: None,
            macro_f1: macro_f1(&test_predictions, &data.test.labels, property)?,
        });
    }
    let confusion = Property::ALL
        .iter()
        .map(|&property| {
            (
                property,
                confusion_matrix(&test_predictions, &data.test.labels, property),
            )
        })
        .collect();

    Ok(MetricsReport {
        representation,
        selected: model.config,
        validation_score,
        rows,
        confusion,
    })
}

fn filter_dim(
    predictions: &[PropertyLabels],
    matrix: &LabeledMatrix,
    dim: usize,
) -> (Vec<PropertyLabels>, Vec<PropertyLabels>) {
    let mut pred = Vec::new();
    let mut truth = Vec::new();
    for (i, key) in matrix.keys.iter().enumerate() {
        if key.dim == dim {
            pred.push(predictions[i]);
            truth.push(matrix.labels[i]);
        }
    }
    (pred, truth)
}
