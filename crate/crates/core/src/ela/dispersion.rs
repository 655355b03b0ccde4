//! Dispersion features: spread of the best points against the whole sample.

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::stats::{euclidean, finite_or_missing, mean, median};

pub const QUANTILES: [f64; 4] = [0.02, 0.05, 0.10, 0.25];

/// For each quantile, selects the `ceil(q * n)` best points and compares the
/// mean and median of their pairwise distances with those of the full sample.
/// Emits ratios (subset / full) and differences (subset - full), 16 features.
pub fn dispersion(sample: &Sample) -> Result<[Option<f64>; 16]> {
    let n = sample.n();
    if n < 20 {
        return Err(Error::SampleTooSmall { n, min: 20 });
    }
    let full = super::pairwise_distances(sample);
    let full_mean = mean(&full);
    let full_median = median(&full);

    // Stable order of the best points: by fitness, ties by index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        sample.y[a]
            .partial_cmp(&sample.y[b])
            .expect("finite fitness")
            .then(a.cmp(&b))
    });

    let rows: Vec<&[f64]> = (0..n)
        .map(|i| sample.x.row(i).to_slice().expect("contiguous row"))
        .collect();

    let mut ratio_mean = [None; 4];
    let mut ratio_median = [None; 4];
    let mut diff_mean = [None; 4];
    let mut diff_median = [None; 4];
    for (qi, q) in QUANTILES.iter().enumerate() {
        let m = (q * n as f64).ceil() as usize;
        if m < 2 {
            continue;
        }
        let subset = &order[..m];
        let mut dists = Vec::with_capacity(m * (m - 1) / 2);
        for a in 0..m {
            for b in (a + 1)..m {
                dists.push(euclidean(rows[subset[a]], rows[subset[b]]));
            }
        }
        let sub_mean = mean(&dists);
        let sub_median = median(&dists);
        ratio_mean[qi] = finite_or_missing(sub_mean / full_mean);
        ratio_median[qi] = finite_or_missing(sub_median / full_median);
        diff_mean[qi] = finite_or_missing(sub_mean - full_mean);
        diff_median[qi] = finite_or_missing(sub_median - full_median);
    }

    let mut out = [None; 16];
    out[..4].copy_from_slice(&ratio_mean);
    out[4..8].copy_from_slice(&ratio_median);
    out[8..12].copy_from_slice(&diff_mean);
    out[12..16].copy_from_slice(&diff_median);
    Ok(out)
}
