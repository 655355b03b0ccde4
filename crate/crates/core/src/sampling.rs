//! Seeded Latin Hypercube sampling and the design/fitness normalizations.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{Bounds, FunctionId, ProblemInstance};

/// Denominator guard used by both normalizations.
pub const NORMALIZATION_EPSILON: f64 = 1e-8;

/// Provenance of a sample: which problem it was drawn on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemRef {
    pub function_id: FunctionId,
    pub dim: usize,
    pub instance_id: u64,
    pub repetition: u32,
}

/// An evaluated design: `n` decision vectors with their fitness values.
#[derive(Debug, Clone)]
pub struct Sample {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub bounds: Bounds,
    pub seed: u64,
    pub problem_ref: ProblemRef,
}

impl Sample {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Normalizes the design to the unit cube and the fitness to `[0, 1]`.
    pub fn normalized(&self) -> Result<NormalizedSample> {
        Ok(NormalizedSample {
            x_hat: normalize_design(&self.x, &self.bounds)?,
            y_hat: normalize_fitness(&self.y)?,
            epsilon: NORMALIZATION_EPSILON,
        })
    }
}

/// Normalized view of a sample.
#[derive(Debug, Clone)]
pub struct NormalizedSample {
    pub x_hat: Array2<f64>,
    pub y_hat: Array1<f64>,
    pub epsilon: f64,
}

/// Latin Hypercube design: one point per stratum in every dimension, with the
/// within-stratum position jittered uniformly. Deterministic per seed.
pub fn lhs_sample(n: usize, dim: usize, bounds: &Bounds, seed: u64) -> Result<Array2<f64>> {
    if n < 2 {
        return Err(Error::SampleTooSmall { n, min: 2 });
    }
    if bounds.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bounds.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, dim));
    let mut strata: Vec<usize> = (0..n).collect();
    for j in 0..dim {
        let l = bounds.lower[j];
        let width = bounds.upper[j] - l;
        strata.sort_unstable();
        strata.shuffle(&mut rng);
        for (i, &stratum) in strata.iter().enumerate() {
            let jitter: f64 = rng.random();
            x[[i, j]] = l + width * ((stratum as f64 + jitter) / n as f64);
        }
    }
    Ok(x)
}

/// Draws a Latin Hypercube sample on `problem` and evaluates it.
pub fn draw_sample(problem: &ProblemInstance, n: usize, seed: u64) -> Result<Sample> {
    draw_sample_rep(problem, n, seed, 1)
}

/// As [`draw_sample`], recording the repetition index in the provenance.
pub fn draw_sample_rep(
    problem: &ProblemInstance,
    n: usize,
    seed: u64,
    repetition: u32,
) -> Result<Sample> {
    let x = lhs_sample(n, problem.dim, &problem.bounds, seed)?;
    let mut y = Array1::zeros(n);
    for (i, row) in x.rows().into_iter().enumerate() {
        y[i] = problem.evaluate(row.as_slice().expect("contiguous row"))?;
    }
    Ok(Sample {
        x,
        y,
        bounds: problem.bounds.clone(),
        seed,
        problem_ref: ProblemRef {
            function_id: problem.function_id,
            dim: problem.dim,
            instance_id: problem.instance_id,
            repetition,
        },
    })
}

/// Affine normalization of a design matrix into the unit cube:
/// `(x - l) / (u - l + epsilon)` per coordinate.
pub fn normalize_design(x: &Array2<f64>, bounds: &Bounds) -> Result<Array2<f64>> {
    validate_bounds(bounds)?;
    if x.ncols() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            got: x.ncols(),
        });
    }
    let mut out = x.clone();
    for j in 0..x.ncols() {
        let l = bounds.lower[j];
        let denom = bounds.upper[j] - l + NORMALIZATION_EPSILON;
        for v in out.column_mut(j).iter_mut() {
            *v = (*v - l) / denom;
        }
    }
    Ok(out)
}

/// Inverse of [`normalize_design`] with the same epsilon.
pub fn denormalize_design(x_hat: &Array2<f64>, bounds: &Bounds) -> Result<Array2<f64>> {
    validate_bounds(bounds)?;
    if x_hat.ncols() != bounds.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounds.dim(),
            got: x_hat.ncols(),
        });
    }
    let mut out = x_hat.clone();
    for j in 0..out.ncols() {
        let l = bounds.lower[j];
        let denom = bounds.upper[j] - l + NORMALIZATION_EPSILON;
        for v in out.column_mut(j).iter_mut() {
            *v = l + *v * denom;
        }
    }
    Ok(out)
}

/// Log normalization of fitness values into `[0, 1]`:
/// `ln(1 + y - min) / (ln(1 + max - min) + epsilon)`.
///
/// The minimum maps to exactly 0; a constant vector maps to all zeros.
pub fn normalize_fitness(y: &Array1<f64>) -> Result<Array1<f64>> {
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let denom = (1.0 + max - min).ln() + NORMALIZATION_EPSILON;
    Ok(y.mapv(|v| (1.0 + v - min).ln() / denom))
}

fn validate_bounds(bounds: &Bounds) -> Result<()> {
    for (index, (&l, &u)) in bounds.lower.iter().zip(bounds.upper.iter()).enumerate() {
        if !(l < u) {
            return Err(Error::InvalidBounds {
                index,
                lower: l,
                upper: u,
            });
        }
    }
    Ok(())
}
