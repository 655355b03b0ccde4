//! Turns stored representation artifacts into flat feature rows for the
//! classifiers.

use std::path::Path;

use crate::dataset::{ela_row_loader, Representation};
use crate::error::{Error, Result};
use crate::fitcloud::{read_cloud_sidecar, read_cloud_tensor};
use crate::fitmap::{read_map_sidecar, read_tensor, BACKGROUND};

/// Flattens one artifact file into a feature row.
///
/// - Feature CSVs pass through unchanged (missing entries stay missing and are
///   eliminated by the dataset loader).
/// - Fitness maps contribute, per channel: occupied-pixel count, mean, sd, min
///   and max of the occupied values, and an 8x8 occupancy-weighted downsample
///   (69 entries per channel). In the stored tensor an all-zero channel is an
///   empty padding channel, and within an occupied channel the background
///   value is exactly 1.0.
/// - Cloud embeddings contribute the per-column mean followed by the
///   per-column standard deviation (2 x width entries).
pub fn flatten_artifact(
    representation: Representation,
    path: &Path,
) -> Result<Vec<Option<f64>>> {
    match representation {
        Representation::Ela => ela_row_loader(path),
        Representation::Cloud => flatten_cloud(path),
        _ => flatten_map(path),
    }
}

const DOWNSAMPLE: usize = 8;

fn flatten_map(path: &Path) -> Result<Vec<Option<f64>>> {
    let sidecar = read_map_sidecar(&path.with_extension("json"))?;
    let values = read_tensor(path, sidecar.resolution, sidecar.channels)?;
    let r = sidecar.resolution;
    let mut out = Vec::with_capacity(sidecar.channels * (5 + DOWNSAMPLE * DOWNSAMPLE));
    for ch in 0..sidecar.channels {
        let channel = values.slice(ndarray::s![.., .., ch]);
        let empty = channel.iter().all(|&v| v == 0.0);
        let mut occupied = Vec::new();
        if !empty {
            for &v in channel.iter() {
                if v < BACKGROUND {
                    occupied.push(v);
                }
            }
        }
        if occupied.is_empty() {
            // Empty padding channel (or one with no recoverable occupancy):
            // zero count and white statistics.
            out.push(Some(0.0));
            out.extend([Some(BACKGROUND), Some(0.0), Some(BACKGROUND), Some(BACKGROUND)]);
            out.extend(std::iter::repeat_n(Some(BACKGROUND), DOWNSAMPLE * DOWNSAMPLE));
            continue;
        }
        let count = occupied.len() as f64;
        let mean = occupied.iter().sum::<f64>() / count;
        let variance = occupied.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        let min = occupied.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = occupied.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        out.push(Some(count));
        out.push(Some(mean));
        out.push(Some(variance.sqrt()));
        out.push(Some(min));
        out.push(Some(max));

        let mut block_sum = vec![0.0; DOWNSAMPLE * DOWNSAMPLE];
        let mut block_count = vec![0usize; DOWNSAMPLE * DOWNSAMPLE];
        for row in 0..r {
            for col in 0..r {
                let v = channel[[row, col]];
                if v < BACKGROUND {
                    let block = (row * DOWNSAMPLE / r) * DOWNSAMPLE + col * DOWNSAMPLE / r;
                    block_sum[block] += v;
                    block_count[block] += 1;
                }
            }
        }
        for b in 0..DOWNSAMPLE * DOWNSAMPLE {
            out.push(Some(if block_count[b] > 0 {
                block_sum[b] / block_count[b] as f64
            } else {
                BACKGROUND
            }));
        }
    }
    Ok(out)
}

fn flatten_cloud(path: &Path) -> Result<Vec<Option<f64>>> {
    let sidecar = read_cloud_sidecar(&path.with_extension("json"))?;
    let embedded = read_cloud_tensor(path, sidecar.n, sidecar.width)?;
    let n = sidecar.n as f64;
    let mut out = Vec::with_capacity(2 * sidecar.width);
    let mut sds = Vec::with_capacity(sidecar.width);
    for j in 0..sidecar.width {
        let column = embedded.column(j);
        let mean = column.sum() / n;
        let variance = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        out.push(Some(mean));
        sds.push(Some(variance.sqrt()));
    }
    out.extend(sds);
    Ok(out)
}
