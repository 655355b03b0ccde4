//! Meta-model features: goodness of fit of simple surrogate regressions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::stats::finite_or_missing;

/// Fits linear and quadratic least-squares surrogates (with and without
/// pairwise interactions) and summarizes them as nine features.
pub fn ela_meta(sample: &Sample) -> Result<[Option<f64>; 9]> {
    let (n, d) = (sample.n(), sample.dim());
    if n < 2 * d + 2 {
        return Err(Error::SampleTooSmall { n, min: 2 * d + 2 });
    }
    let y: Vec<f64> = sample.y.to_vec();

    let lin = fit(&design(sample, false, false), &y);
    let lin_int = fit(&design(sample, false, true), &y);
    let quad = fit(&design(sample, true, false), &y);
    let quad_int = fit(&design(sample, true, true), &y);

    let mut out = [None; 9];
    if let Some(f) = &lin {
        out[0] = finite_or_missing(f.adjusted_r2);
        out[1] = finite_or_missing(f.coefficients[0]);
        let abs: Vec<f64> = f.coefficients[1..=d].iter().map(|c| c.abs()).collect();
        let min = abs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out[2] = finite_or_missing(min / max);
        out[7] = finite_or_missing(min);
        out[8] = finite_or_missing(max);
    }
    if let Some(f) = &lin_int {
        out[3] = finite_or_missing(f.adjusted_r2);
    }
    if let Some(f) = &quad {
        out[4] = finite_or_missing(f.adjusted_r2);
        // Quadratic coefficients sit behind the intercept and the d linear terms.
        let quad_abs: Vec<f64> = f.coefficients[d + 1..=2 * d].iter().map(|c| c.abs()).collect();
        let min = quad_abs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = quad_abs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out[5] = finite_or_missing(max / min);
    }
    if let Some(f) = &quad_int {
        out[6] = finite_or_missing(f.adjusted_r2);
    }
    Ok(out)
}

struct Fit {
    coefficients: Vec<f64>,
    adjusted_r2: f64,
}

/// Design matrix columns: intercept, linear terms, then optionally squares and
/// pairwise products.
fn design(sample: &Sample, squares: bool, interactions: bool) -> DMatrix<f64> {
    let (n, d) = (sample.n(), sample.dim());
    let mut cols: Vec<Vec<f64>> = Vec::new();
    cols.push(vec![1.0; n]);
    for j in 0..d {
        cols.push(sample.x.column(j).to_vec());
    }
    if squares {
        for j in 0..d {
            cols.push(sample.x.column(j).iter().map(|v| v * v).collect());
        }
    }
    if interactions {
        for a in 0..d {
            for b in (a + 1)..d {
                cols.push(
                    sample
                        .x
                        .column(a)
                        .iter()
                        .zip(sample.x.column(b).iter())
                        .map(|(u, v)| u * v)
                        .collect(),
                );
            }
        }
    }
    DMatrix::from_fn(n, cols.len(), |r, c| cols[c][r])
}

/// Least squares through SVD. Returns None for rank-deficient designs or when
/// the adjusted R-squared is undefined.
fn fit(a: &DMatrix<f64>, y: &[f64]) -> Option<Fit> {
    let (n, p) = (a.nrows(), a.ncols());
    if n <= p + 1 {
        return None;
    }
    let b = DMatrix::from_column_slice(n, 1, y);
    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = s_max * n.max(p) as f64 * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < p {
        return None;
    }
    let solution = svd.solve(&b, tol).ok()?;
    let coefficients: Vec<f64> = solution.column(0).iter().cloned().collect();

    let fitted = a * &solution;
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let ss_res: f64 = y
        .iter()
        .zip(fitted.column(0).iter())
        .map(|(obs, fit)| (obs - fit) * (obs - fit))
        .sum();
    let ss_tot: f64 = y.iter().map(|obs| (obs - mean_y) * (obs - mean_y)).sum();
    if ss_tot == 0.0 {
        return None;
    }
    let r2 = 1.0 - ss_res / ss_tot;
    // p includes the intercept; predictors are p - 1.
    let adjusted_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / (n as f64 - p as f64);
    Some(Fit {
        coefficients,
        adjusted_r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Bounds, FunctionId};
    use crate::sampling::{ProblemRef, Sample};
    use ndarray::{Array1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_from(x: Array2<f64>, y: Array1<f64>) -> Sample {
        let dim = x.ncols();
        Sample {
            x,
            y,
            bounds: Bounds::symmetric(dim, 1e6),
            seed: 0,
            problem_ref: ProblemRef {
                function_id: FunctionId::F1,
                dim,
                instance_id: 0,
                repetition: 1,
            },
        }
    }

    fn random_design(n: usize, d: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Array2::from_shape_fn((n, d), |_| rng.random_range(-5.0..5.0))
    }

    #[test]
    fn perfectly_linear_response_has_unit_r2() {
        let x = random_design(60, 2, 1);
        let y = Array1::from_iter(x.rows().into_iter().map(|r| 3.0 * r[0] - 2.0 * r[1] + 0.5));
        let s = sample_from(x, y);
        let f = ela_meta(&s).unwrap();
        assert!((f[0].unwrap() - 1.0).abs() < 1e-9, "linear adj r2");
        assert!((f[1].unwrap() - 0.5).abs() < 1e-9, "intercept");
        assert!((f[7].unwrap() - 2.0).abs() < 1e-9, "min |coef|");
        assert!((f[8].unwrap() - 3.0).abs() < 1e-9, "max |coef|");
        assert!((f[2].unwrap() - 2.0 / 3.0).abs() < 1e-9, "min/max ratio");
    }

    #[test]
    fn quadratic_bowl_on_centered_design() {
        // Symmetric design: x and -x both present, so the linear fit explains
        // nothing while the quadratic fit is exact.
        let base = random_design(50, 2, 3);
        let mut x = Array2::zeros((100, 2));
        for i in 0..50 {
            x.row_mut(i).assign(&base.row(i));
            x.row_mut(50 + i).assign(&base.row(i).mapv(|v| -v));
        }
        let y = Array1::from_iter(x.rows().into_iter().map(|r| r[0] * r[0] + r[1] * r[1]));
        let s = sample_from(x, y);
        let f = ela_meta(&s).unwrap();
        assert!((f[4].unwrap() - 1.0).abs() < 1e-9, "quadratic adj r2");
        assert!(f[0].unwrap() < 0.1, "linear adj r2 near zero: {:?}", f[0]);
        assert!((f[5].unwrap() - 1.0).abs() < 1e-9, "equal curvature, cond 1");
    }

    #[test]
    fn constant_response_is_missing() {
        let x = random_design(40, 2, 5);
        let y = Array1::from_elem(40, 2.5);
        let s = sample_from(x, y);
        let f = ela_meta(&s).unwrap();
        assert_eq!(f[0], None);
        assert_eq!(f[4], None);
    }

    #[test]
    fn matches_independent_normal_equations_solver() {
        let x = random_design(80, 3, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let y = Array1::from_iter(x.rows().into_iter().map(|r| {
            1.5 * r[0] - 0.5 * r[1] + 2.0 * r[2] + rng.random_range(-0.1..0.1)
        }));
        let s = sample_from(x.clone(), y.clone());
        let f = ela_meta(&s).unwrap();

        // Reference: solve the linear normal equations by Gaussian elimination.
        let n = 80;
        let p = 4;
        let mut a = vec![vec![0.0; p]; n];
        for i in 0..n {
            a[i][0] = 1.0;
            for j in 0..3 {
                a[i][j + 1] = x[[i, j]];
            }
        }
        let mut ata = vec![vec![0.0; p]; p];
        let mut aty = vec![0.0; p];
        for r in 0..p {
            for c in 0..p {
                ata[r][c] = (0..n).map(|i| a[i][r] * a[i][c]).sum();
            }
            aty[r] = (0..n).map(|i| a[i][r] * y[i]).sum();
        }
        let beta = gaussian_solve(&mut ata, &mut aty);
        let fitted: Vec<f64> = (0..n)
            .map(|i| (0..p).map(|j| a[i][j] * beta[j]).sum())
            .collect();
        let mean_y = y.sum() / n as f64;
        let ss_res: f64 = (0..n).map(|i| (y[i] - fitted[i]).powi(2)).sum();
        let ss_tot: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
        let adj = 1.0 - (1.0 - (1.0 - ss_res / ss_tot)) * (n as f64 - 1.0) / (n as f64 - p as f64);
        assert!((f[0].unwrap() - adj).abs() < 1e-9, "{} vs {adj}", f[0].unwrap());
        assert!((f[1].unwrap() - beta[0]).abs() < 1e-7);
    }

    fn gaussian_solve(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r1, &r2| a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in (col + 1)..n {
                let factor = a[row][col] / a[col][col];
                for c in col..n {
                    a[row][c] -= factor * a[col][c];
                }
                b[row] -= factor * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for c in (row + 1)..n {
                acc -= a[row][c] * x[c];
            }
            x[row] = acc / a[row][row];
        }
        x
    }
}
