//! Information-content features of the fitness sequence along a
//! nearest-neighbor tour through the sample.

use crate::error::{Error, Result};
use crate::sampling::Sample;
use crate::stats::euclidean;

/// Threshold grid for the slope symbolization.
#[derive(Debug, Clone)]
pub struct InfoContentSettings {
    /// Sorted thresholds; must start at 0.
    pub eps_values: Vec<f64>,
}

impl Default for InfoContentSettings {
    fn default() -> Self {
        // 0 plus 200 log-spaced thresholds between 1e-5 and 1e5.
        let mut eps_values = vec![0.0];
        let count = 200;
        for i in 0..count {
            let exponent = -5.0 + 10.0 * i as f64 / (count - 1) as f64;
            eps_values.push(10f64.powf(exponent));
        }
        InfoContentSettings { eps_values }
    }
}

/// Five sequence features: maximum information content, settling sensitivity,
/// the threshold attaining the maximum, initial partial information, and the
/// half-settling threshold of the partial information.
pub fn info_content(sample: &Sample, settings: &InfoContentSettings) -> Result<[Option<f64>; 5]> {
    let n = sample.n();
    if n < 3 {
        return Err(Error::SampleTooSmall { n, min: 3 });
    }
    let tour = nearest_neighbor_tour(sample);
    let slopes = tour_slopes(sample, &tour);

    let mut h_max = f64::NEG_INFINITY;
    let mut eps_max = None;
    let mut eps_settling = None;
    let mut m0 = 0.0;
    let mut eps_half = None;
    for (idx, &eps) in settings.eps_values.iter().enumerate() {
        let symbols = symbolize(&slopes, eps);
        let h = information_content(&symbols);
        let m = partial_information(&symbols);
        if h > h_max {
            h_max = h;
            eps_max = Some(eps);
        }
        if idx == 0 {
            m0 = m;
        }
        if eps > 0.0 && eps_settling.is_none() && h < 0.05 {
            eps_settling = Some(eps.log10());
        }
        if eps > 0.0 && eps_half.is_none() && m < 0.5 * m0 {
            eps_half = Some(eps.log10());
        }
    }
    Ok([
        Some(h_max),
        eps_settling,
        eps_max,
        Some(m0),
        eps_half,
    ])
}

/// Greedy nearest-neighbor tour starting at index 0, ties by lower index.
fn nearest_neighbor_tour(sample: &Sample) -> Vec<usize> {
    let n = sample.n();
    let rows: Vec<&[f64]> = (0..n)
        .map(|i| sample.x.row(i).to_slice().expect("contiguous row"))
        .collect();
    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    let mut current = 0;
    visited[0] = true;
    tour.push(0);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_dist = f64::INFINITY;
        for (j, seen) in visited.iter().enumerate() {
            if !seen {
                let dist = euclidean(rows[current], rows[j]);
                if dist < best_dist {
                    best_dist = dist;
                    best = j;
                }
            }
        }
        visited[best] = true;
        tour.push(best);
        current = best;
    }
    tour
}

/// Fitness differences per unit distance between consecutive tour points.
fn tour_slopes(sample: &Sample, tour: &[usize]) -> Vec<f64> {
    let rows: Vec<&[f64]> = (0..sample.n())
        .map(|i| sample.x.row(i).to_slice().expect("contiguous row"))
        .collect();
    tour.windows(2)
        .map(|w| {
            let dy = sample.y[w[1]] - sample.y[w[0]];
            let dist = euclidean(rows[w[0]], rows[w[1]]);
            if dist == 0.0 {
                if dy == 0.0 {
                    0.0
                } else {
                    dy.signum() * f64::INFINITY
                }
            } else {
                dy / dist
            }
        })
        .collect()
}

fn symbolize(slopes: &[f64], eps: f64) -> Vec<i8> {
    slopes
        .iter()
        .map(|&s| {
            if s > eps {
                1
            } else if s < -eps {
                -1
            } else {
                0
            }
        })
        .collect()
}

/// Entropy (base 6) of the adjacent unequal symbol pairs, with probabilities
/// taken over all adjacent pairs.
fn information_content(symbols: &[i8]) -> f64 {
    let total = symbols.len().saturating_sub(1);
    if total == 0 {
        return 0.0;
    }
    let mut counts = [[0usize; 3]; 3];
    for w in symbols.windows(2) {
        counts[(w[0] + 1) as usize][(w[1] + 1) as usize] += 1;
    }
    let mut h = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            if a != b && counts[a][b] > 0 {
                let p = counts[a][b] as f64 / total as f64;
                h -= p * p.log(6.0);
            }
        }
    }
    h
}

/// Length of the zero-free, repeat-collapsed symbol string, relative to the
/// full string length.
fn partial_information(symbols: &[i8]) -> f64 {
    if symbols.is_empty() {
        return 0.0;
    }
    let mut blocks = 0usize;
    let mut last = 0i8;
    for &s in symbols {
        if s != 0 && s != last {
            blocks += 1;
            last = s;
        }
    }
    blocks as f64 / symbols.len() as f64
}
