//! Classical landscape features computed from an evaluated sample.
//!
//! Seven feature groups are emitted in a fixed order as one flat vector of 53
//! entries. A statistic whose definition degenerates on the given sample (zero
//! variance, rank deficiency, an empty subset) is reported as an explicit
//! missing marker, never as a silent zero; the dataset layer eliminates
//! columns that are missing anywhere.

mod dispersion;
mod distr;
mod fdc;
mod info_content;
mod meta;
mod nbc;
mod pca;

use std::path::Path;

use crate::error::{Error, Result};
use crate::sampling::Sample;

pub use dispersion::dispersion;
pub use distr::ela_distr;
pub use fdc::fdc;
pub use info_content::{info_content, InfoContentSettings};
pub use meta::ela_meta;
pub use nbc::nbc;
pub use pca::pca_misc;

/// Names of all features, in emission order.
pub const FEATURE_NAMES: [&str; 53] = [
    "meta.lin_simple.adj_r2",
    "meta.lin_simple.intercept",
    "meta.lin_simple.coef_min_by_max",
    "meta.lin_w_interact.adj_r2",
    "meta.quad_simple.adj_r2",
    "meta.quad_simple.cond",
    "meta.quad_w_interact.adj_r2",
    "meta.lin_simple.coef_min",
    "meta.lin_simple.coef_max",
    "distr.skewness",
    "distr.kurtosis",
    "distr.n_peaks",
    "nbc.nn_nb_sd_ratio",
    "nbc.nn_nb_mean_ratio",
    "nbc.nn_nb_cor",
    "nbc.dist_ratio_cv",
    "nbc.fitness_indegree_cor",
    "disp.ratio_mean_02",
    "disp.ratio_mean_05",
    "disp.ratio_mean_10",
    "disp.ratio_mean_25",
    "disp.ratio_median_02",
    "disp.ratio_median_05",
    "disp.ratio_median_10",
    "disp.ratio_median_25",
    "disp.diff_mean_02",
    "disp.diff_mean_05",
    "disp.diff_mean_10",
    "disp.diff_mean_25",
    "disp.diff_median_02",
    "disp.diff_median_05",
    "disp.diff_median_10",
    "disp.diff_median_25",
    "ic.h_max",
    "ic.eps_s",
    "ic.eps_max",
    "ic.m0",
    "ic.eps_ratio",
    "fdc.coeff",
    "fdc.dist_mean",
    "fdc.dist_sd",
    "fdc.dist_max",
    "fdc.fit_mean",
    "fdc.fit_sd",
    "pca.expl_var_cov_x",
    "pca.expl_var_cor_x",
    "pca.expl_var_cov_init",
    "pca.expl_var_cor_init",
    "pca.pc1_cov_x",
    "pca.pc1_cor_x",
    "pca.pc1_cov_init",
    "pca.pc1_cor_init",
    "pca.dim",
];

/// A flat feature vector; entries align with [`FEATURE_NAMES`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<Option<f64>>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        let idx = FEATURE_NAMES.iter().position(|&n| n == name)?;
        self.values[idx]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Computes all feature groups. A group whose preconditions fail contributes
/// missing entries instead of aborting the vector.
pub fn feature_vector(sample: &Sample) -> FeatureVector {
    let mut values = Vec::with_capacity(FEATURE_NAMES.len());
    extend(&mut values, ela_meta(sample).map(|a| a.to_vec()), 9);
    extend(&mut values, ela_distr(sample).map(|a| a.to_vec()), 3);
    extend(&mut values, nbc(sample).map(|a| a.to_vec()), 5);
    extend(&mut values, dispersion(sample).map(|a| a.to_vec()), 16);
    extend(
        &mut values,
        info_content(sample, &InfoContentSettings::default()).map(|a| a.to_vec()),
        5,
    );
    extend(&mut values, fdc(sample).map(|a| a.to_vec()), 6);
    extend(&mut values, pca_misc(sample).map(|a| a.to_vec()), 9);
    debug_assert_eq!(values.len(), FEATURE_NAMES.len());
    FeatureVector { values }
}

fn extend(values: &mut Vec<Option<f64>>, group: Result<Vec<Option<f64>>>, arity: usize) {
    match group {
        Ok(g) => {
            debug_assert_eq!(g.len(), arity);
            values.extend(g);
        }
        Err(_) => values.extend(std::iter::repeat_n(None, arity)),
    }
}

/// Condensed upper-triangle Euclidean distances on the design, `(i, j)` with
/// `i < j` in lexicographic order.
pub(crate) fn pairwise_distances(sample: &Sample) -> Vec<f64> {
    let n = sample.n();
    let rows: Vec<&[f64]> = (0..n)
        .map(|i| sample.x.row(i).to_slice().expect("contiguous row"))
        .collect();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(crate::stats::euclidean(rows[i], rows[j]));
        }
    }
    out
}

/// Writes feature vectors as CSV: header of feature names, one row per
/// vector, missing entries as empty cells.
pub fn write_features_csv(path: &Path, vectors: &[FeatureVector]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e)))?;
    writer
        .write_record(FEATURE_NAMES)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e)))?;
    for v in vectors {
        let record: Vec<String> = v
            .values
            .iter()
            .map(|entry| entry.map(|x| x.to_string()).unwrap_or_default())
            .collect();
        writer
            .write_record(&record)
            .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e)))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads a CSV written by [`write_features_csv`]; returns column names and one
/// value row per record.
pub fn read_features_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::io(path.display().to_string(), std::io::Error::other(e)))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedArtifact {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedArtifact {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        let row: Result<Vec<Option<f64>>> = record
            .iter()
            .map(|cell| {
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|e| {
                        Error::MalformedArtifact {
                            path: path.to_path_buf(),
                            reason: format!("bad number `{cell}`: {e}"),
                        }
                    })
                }
            })
            .collect();
        rows.push(row?);
    }
    Ok((names, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_problem, FunctionId};
    use crate::sampling::draw_sample;
    use ndarray::Array1;

    #[test]
    fn vector_has_fixed_arity_and_is_deterministic() {
        let p = make_problem(FunctionId::F3, 2, 1).unwrap();
        let s = draw_sample(&p, 120, 3).unwrap();
        let a = feature_vector(&s);
        let b = feature_vector(&s);
        assert_eq!(a.len(), 53);
        assert_eq!(a, b);
    }

    #[test]
    fn constant_fitness_routes_degeneracies_to_missing() {
        let p = make_problem(FunctionId::F1, 2, 0).unwrap();
        let mut s = draw_sample(&p, 100, 1).unwrap();
        s.y = Array1::zeros(s.n());
        let v = feature_vector(&s);
        assert_eq!(v.len(), 53);
        assert_eq!(v.get("distr.skewness"), None);
        assert_eq!(v.get("distr.kurtosis"), None);
        assert_eq!(v.get("distr.n_peaks"), Some(1.0));
        assert_eq!(v.get("nbc.nn_nb_mean_ratio"), None);
        assert_eq!(v.get("ic.h_max"), Some(0.0));
        assert_eq!(v.get("ic.m0"), Some(0.0));
        assert_eq!(v.get("fdc.coeff"), None);
        // Design-only features are still present.
        assert!(v.get("pca.expl_var_cov_x").is_some());
        assert_eq!(v.get("pca.dim"), Some(2.0));
        // Missing positions reproduce exactly.
        let again = feature_vector(&s);
        for (a, b) in v.values.iter().zip(again.values.iter()) {
            assert_eq!(a.is_none(), b.is_none());
        }
    }

    #[test]
    fn csv_round_trip_preserves_values_and_missing() {
        let p = make_problem(FunctionId::F20, 3, 2).unwrap();
        let s = draw_sample(&p, 80, 7).unwrap();
        let v = feature_vector(&s);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        write_features_csv(&path, std::slice::from_ref(&v)).unwrap();
        let (names, rows) = read_features_csv(&path).unwrap();
        assert_eq!(names, FEATURE_NAMES.to_vec());
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0], v.values);
    }

    #[test]
    fn translation_of_the_design_leaves_x_features_unchanged() {
        let p = make_problem(FunctionId::F8, 2, 1).unwrap();
        let s = draw_sample(&p, 60, 11).unwrap();
        let mut shifted = s.clone();
        shifted.x.mapv_inplace(|v| v + 17.5);
        // Keep bounds consistent with the shifted design.
        shifted.bounds.lower.mapv_inplace(|v| v + 17.5);
        shifted.bounds.upper.mapv_inplace(|v| v + 17.5);

        let a = feature_vector(&s);
        let b = feature_vector(&shifted);
        let invariant = [
            "nbc.nn_nb_sd_ratio",
            "nbc.nn_nb_mean_ratio",
            "nbc.nn_nb_cor",
            "nbc.dist_ratio_cv",
            "nbc.fitness_indegree_cor",
            "disp.ratio_mean_02",
            "disp.ratio_mean_25",
            "disp.diff_median_10",
            "fdc.dist_mean",
            "fdc.dist_sd",
            "fdc.dist_max",
            "pca.expl_var_cov_x",
            "pca.pc1_cov_x",
        ];
        for name in invariant {
            match (a.get(name), b.get(name)) {
                (Some(x), Some(y)) => {
                    assert!((x - y).abs() < 1e-9, "{name}: {x} vs {y}")
                }
                (None, None) => {}
                other => panic!("{name}: missing mismatch {other:?}"),
            }
        }
    }
}
