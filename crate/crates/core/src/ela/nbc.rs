//! Nearest-better clustering features.
//!
//! For every point, compare the distance to its nearest neighbor with the
//! distance to its nearest strictly better point. Points with no better point
//! (the sample best) have no nearest-better distance and are excluded from the
//! aggregates.

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::stats::{euclidean, finite_or_missing, mean, pearson, sample_sd};

pub fn nbc(sample: &Sample) -> Result<[Option<f64>; 5]> {
    let n = sample.n();
    if n < 3 {
        return Err(Error::SampleTooSmall { n, min: 3 });
    }
    let rows: Vec<&[f64]> = (0..n)
        .map(|i| sample.x.row(i).to_slice().expect("contiguous row"))
        .collect();
    let y = &sample.y;

    let mut nn_dist = vec![f64::INFINITY; n];
    let mut nb_dist = vec![f64::NAN; n];
    let mut nb_index = vec![usize::MAX; n];
    for i in 0..n {
        let mut best_nb = f64::INFINITY;
        let mut best_nb_idx = usize::MAX;
        for j in 0..n {
            if j == i {
                continue;
            }
            let dist = euclidean(rows[i], rows[j]);
            if dist < nn_dist[i] {
                nn_dist[i] = dist;
            }
            if y[j] < y[i] && (dist < best_nb || (dist == best_nb && j < best_nb_idx)) {
                best_nb = dist;
                best_nb_idx = j;
            }
        }
        if best_nb_idx != usize::MAX {
            nb_dist[i] = best_nb;
            nb_index[i] = best_nb_idx;
        }
    }

    let valid: Vec<usize> = (0..n).filter(|&i| nb_index[i] != usize::MAX).collect();
    let mut out = [None; 5];
    if valid.len() >= 2 {
        let nn: Vec<f64> = valid.iter().map(|&i| nn_dist[i]).collect();
        let nb: Vec<f64> = valid.iter().map(|&i| nb_dist[i]).collect();
        out[0] = finite_or_missing(sample_sd(&nn) / sample_sd(&nb));
        out[1] = finite_or_missing(mean(&nn) / mean(&nb));
        out[2] = finite_or_missing(pearson(&nn, &nb));
        let ratios: Vec<f64> = nn
            .iter()
            .zip(nb.iter())
            .map(|(&a, &b)| b / a)
            .collect();
        out[3] = finite_or_missing(sample_sd(&ratios) / mean(&ratios));
    }

    // In-degree of the nearest-better graph, over all points.
    let mut indegree = vec![0.0f64; n];
    for i in 0..n {
        if nb_index[i] != usize::MAX {
            indegree[nb_index[i]] += 1.0;
        }
    }
    let fitness: Vec<f64> = y.to_vec();
    out[4] = finite_or_missing(pearson(&fitness, &indegree));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Bounds, FunctionId};
    use crate::sampling::ProblemRef;
    use ndarray::{Array1, Array2};

    fn sample_from(x: Array2<f64>, y: Vec<f64>) -> Sample {
        let dim = x.ncols();
        Sample {
            x,
            y: Array1::from_vec(y),
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
    fn monotone_chain_has_unit_mean_ratio() {
        let x = Array2::from_shape_vec((4, 1), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = vec![0.0, 1.0, 2.0, 3.0];
        let f = nbc(&sample_from(x, y)).unwrap();
        // Every non-best point's nearest better point is its left neighbor at
        // distance 1, which is also its nearest neighbor.
        assert_eq!(f[1], Some(1.0));
    }

    #[test]
    fn tight_clusters_shrink_the_mean_ratio() {
        // Two clusters far apart; fitness interleaves so that some points'
        // nearest better point sits in the other cluster.
        let coords = vec![0.0, 0.1, 0.2, 0.3, 100.0, 100.1, 100.2, 100.3];
        let x = Array2::from_shape_vec((8, 1), coords).unwrap();
        let y = vec![0.0, 2.0, 4.0, 6.0, 1.0, 3.0, 5.0, 7.0];
        let f = nbc(&sample_from(x, y)).unwrap();
        assert!(f[1].unwrap() < 1.0, "mean(nn)/mean(nb) = {:?}", f[1]);
    }

    #[test]
    fn equal_fitness_everywhere_is_missing() {
        let x = Array2::from_shape_vec((5, 1), vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let f = nbc(&sample_from(x, vec![2.0; 5])).unwrap();
        assert_eq!(f[0], None);
        assert_eq!(f[1], None);
        assert_eq!(f[2], None);
        assert_eq!(f[3], None);
        assert_eq!(f[4], None, "indegree is identically zero");
    }

    #[test]
    fn rejects_tiny_samples() {
        let x = Array2::zeros((2, 1));
        assert!(matches!(
            nbc(&sample_from(x, vec![0.0, 1.0])),
            Err(Error::SampleTooSmall { .. })
        ));
    }
}
