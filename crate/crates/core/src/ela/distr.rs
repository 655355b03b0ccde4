//! Fitness-distribution features: skewness, kurtosis and a peak count.

use crate::error::{Error, Result};
use crate::sampling::Sample;

const HISTOGRAM_BINS: usize = 32;

/// Moment-based sample skewness, excess kurtosis, and the number of peaks of
/// the fitness histogram (32 bins, 3-bin moving-average smoothing).
pub fn ela_distr(sample: &Sample) -> Result<[Option<f64>; 3]> {
    let n = sample.n();
    if n < 4 {
        return Err(Error::SampleTooSmall { n, min: 4 });
    }
    let y: Vec<f64> = sample.y.to_vec();
    let mean = y.iter().sum::<f64>() / n as f64;
    let m2 = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let mut out = [None, None, Some(1.0)];
    if m2 > 0.0 {
        let m3 = y.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n as f64;
        let m4 = y.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n as f64;
        out[0] = Some(m3 / m2.powf(1.5));
        out[1] = Some(m4 / (m2 * m2) - 3.0);
        out[2] = Some(histogram_peaks(&y) as f64);
    }
    Ok(out)
}

/// Local maxima of the smoothed fitness histogram. A plateau counts once; the
/// outside of the histogram counts as empty.
fn histogram_peaks(y: &[f64]) -> usize {
    let min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return 1;
    }
    let mut counts = [0.0f64; HISTOGRAM_BINS];
    for &v in y {
        let t = (v - min) / (max - min);
        let bin = ((t * HISTOGRAM_BINS as f64).floor() as usize).min(HISTOGRAM_BINS - 1);
        counts[bin] += 1.0;
    }
    let smoothed: Vec<f64> = (0..HISTOGRAM_BINS)
        .map(|i| {
            let left = if i > 0 { counts[i - 1] } else { 0.0 };
            let right = if i + 1 < HISTOGRAM_BINS { counts[i + 1] } else { 0.0 };
            (left + counts[i] + right) / 3.0
        })
        .collect();
    let mut peaks = 0;
    let mut i = 0;
    while i < HISTOGRAM_BINS {
        let v = smoothed[i];
        let mut j = i;
        while j + 1 < HISTOGRAM_BINS && smoothed[j + 1] == v {
            j += 1;
        }
        let left = if i == 0 { f64::NEG_INFINITY } else { smoothed[i - 1] };
        let right = if j + 1 == HISTOGRAM_BINS {
            f64::NEG_INFINITY
        } else {
            smoothed[j + 1]
        };
        if v > left && v > right {
            peaks += 1;
        }
        i = j + 1;
    }
    peaks
}
