//! Principal-component summary features of the design (and of the design with
//! the fitness column appended), plus the raw dimensionality.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::stats::finite_or_missing;

/// Explained-variance summaries of the covariance and correlation matrices of
/// `X` and `[X | y]`: the fraction of components needed to reach 90% of the
/// variance, the share of the first component, and the dimensionality.
pub fn pca_misc(sample: &Sample) -> Result<[Option<f64>; 9]> {
    let (n, d) = (sample.n(), sample.dim());
    if n <= d + 1 {
        return Err(Error::SampleTooSmall { n, min: d + 2 });
    }
    let x = &sample.x;
    let mut augmented = Array2::zeros((n, d + 1));
    augmented.slice_mut(ndarray::s![.., ..d]).assign(x);
    augmented.column_mut(d).assign(&sample.y);

    let cov_x = spectrum(&covariance(x));
    let cor_x = correlation(x).map(|m| spectrum(&m));
    let cov_init = spectrum(&covariance(&augmented));
    let cor_init = correlation(&augmented).map(|m| spectrum(&m));

    let mut out = [None; 9];
    out[0] = cov_x.as_ref().and_then(|s| finite_or_missing(s.fraction_for_90));
    out[1] = cor_x
        .as_ref()
        .and_then(|o| o.as_ref())
        .and_then(|s| finite_or_missing(s.fraction_for_90));
    out[2] = cov_init.as_ref().and_then(|s| finite_or_missing(s.fraction_for_90));
    out[3] = cor_init
        .as_ref()
        .and_then(|o| o.as_ref())
        .and_then(|s| finite_or_missing(s.fraction_for_90));
    out[4] = cov_x.as_ref().and_then(|s| finite_or_missing(s.first_share));
    out[5] = cor_x
        .as_ref()
        .and_then(|o| o.as_ref())
        .and_then(|s| finite_or_missing(s.first_share));
    out[6] = cov_init.as_ref().and_then(|s| finite_or_missing(s.first_share));
    out[7] = cor_init
        .as_ref()
        .and_then(|o| o.as_ref())
        .and_then(|s| finite_or_missing(s.first_share));
    out[8] = Some(d as f64);
    Ok(out)
}

struct Spectrum {
    fraction_for_90: f64,
    first_share: f64,
}

/// Eigenvalue summary of a symmetric positive semi-definite matrix.
fn spectrum(m: &Array2<f64>) -> Option<Spectrum> {
    let d = m.nrows();
    let sym = nalgebra::DMatrix::from_fn(d, d, |r, c| m[[r, c]]);
    let eigen = nalgebra::SymmetricEigen::try_new(sym, 1e-13, 10_000)?;
    let mut values: Vec<f64> = eigen.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut cumulative = 0.0;
    let mut needed = values.len();
    for (i, v) in values.iter().enumerate() {
        cumulative += v;
        if cumulative >= 0.9 * total {
            needed = i + 1;
            break;
        }
    }
    Some(Spectrum {
        fraction_for_90: needed as f64 / values.len() as f64,
        first_share: values[0] / total,
    })
}

/// Sample covariance matrix (n - 1 denominator).
fn covariance(x: &Array2<f64>) -> Array2<f64> {
    let (n, d) = (x.nrows(), x.ncols());
    let means: Vec<f64> = (0..d).map(|j| x.column(j).sum() / n as f64).collect();
    let mut cov = Array2::zeros((d, d));
    for a in 0..d {
        for b in a..d {
            let mut acc = 0.0;
            for i in 0..n {
                acc += (x[[i, a]] - means[a]) * (x[[i, b]] - means[b]);
            }
            let v = acc / (n - 1) as f64;
            cov[[a, b]] = v;
            cov[[b, a]] = v;
        }
    }
    cov
}

/// Correlation matrix; None when any column has zero variance.
fn correlation(x: &Array2<f64>) -> Option<Array2<f64>> {
    let cov = covariance(x);
    let d = cov.nrows();
    let sds: Vec<f64> = (0..d).map(|j| cov[[j, j]].sqrt()).collect();
    if sds.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return None;
    }
    let mut cor = Array2::zeros((d, d));
    for a in 0..d {
        for b in 0..d {
            cor[[a, b]] = cov[[a, b]] / (sds[a] * sds[b]);
        }
    }
    Some(cor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Bounds, FunctionId};
    use crate::sampling::ProblemRef;
    use ndarray::Array1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn sample_from(x: Array2<f64>, y: Array1<f64>) -> Sample {
        let dim = x.ncols();
        Sample {
            x,
            y,
            bounds: Bounds::symmetric(dim, 1e9),
            seed: 0,
            problem_ref: ProblemRef {
                function_id: FunctionId::F1,
                dim,
                instance_id: 0,
                repetition: 1,
            },
        }
    }

    #[test]
    fn isotropic_design_needs_all_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Array2::from_shape_fn((400, 5), |_| rng.sample::<f64, _>(StandardNormal));
        let y = Array1::from_shape_fn(400, |_| rng.sample::<f64, _>(StandardNormal));
        let f = pca_misc(&sample_from(x, y)).unwrap();
        assert!(f[0].unwrap() > 0.8, "cov fraction {:?}", f[0]);
        assert_eq!(f[8], Some(5.0));
    }

    #[test]
    fn dominant_direction_captures_first_share() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Array2::from_shape_fn((300, 3), |(_, j)| {
            let scale = if j == 0 { 10.0 } else { 0.5 };
            scale * rng.sample::<f64, _>(StandardNormal)
        });
        let y = Array1::zeros(300);
        let f = pca_misc(&sample_from(x, y)).unwrap();
        assert!(f[4].unwrap() > 0.9, "pc1 share {:?}", f[4]);
    }

    #[test]
    fn zero_variance_column_blanks_correlation_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = Array2::from_shape_fn((50, 3), |_| rng.sample::<f64, _>(StandardNormal));
        for i in 0..50 {
            x[[i, 1]] = 2.0;
        }
        let y = Array1::from_shape_fn(50, |i| i as f64);
        let f = pca_misc(&sample_from(x, y)).unwrap();
        assert_eq!(f[1], None, "correlation of degenerate column");
        assert!(f[0].is_some(), "covariance still defined");
    }
}
