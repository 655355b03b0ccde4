//! Fitness-distance correlation features, anchored at the best sample point.

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::stats::{euclidean, finite_or_missing, mean, pearson, sample_sd};

pub fn fdc(sample: &Sample) -> Result<[Option<f64>; 6]> {
    let n = sample.n();
    if n < 3 {
        return Err(Error::SampleTooSmall { n, min: 3 });
    }
    let best = (0..n)
        .min_by(|&a, &b| {
            sample.y[a]
                .partial_cmp(&sample.y[b])
                .expect("finite fitness")
                .then(a.cmp(&b))
        })
        .expect("non-empty sample");
    let best_row = sample.x.row(best).to_vec();
    let distances: Vec<f64> = (0..n)
        .map(|i| euclidean(sample.x.row(i).to_slice().expect("contiguous row"), &best_row))
        .collect();
    let fitness: Vec<f64> = sample.y.to_vec();
    let gaps: Vec<f64> = fitness.iter().map(|v| v - sample.y[best]).collect();

    Ok([
        finite_or_missing(pearson(&distances, &fitness)),
        finite_or_missing(mean(&distances)),
        finite_or_missing(sample_sd(&distances)),
        finite_or_missing(distances.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        finite_or_missing(mean(&gaps)),
        finite_or_missing(sample_sd(&fitness)),
    ])
}
