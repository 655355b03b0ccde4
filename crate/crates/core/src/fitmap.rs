//! 2D fitness-map construction via four reduction methods.
//!
//! A fitness map places normalized fitness values on a `R x R` pixel grid at
//! the (reduced) sample coordinates. Unoccupied pixels hold the white sentinel
//! 1.0 together with an explicit occupancy mask, so the background stays
//! distinguishable from a legitimate value of 1.0.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, Array3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Bounds;
use crate::sampling::{normalize_design, normalize_fitness, ProblemRef, Sample,
    NORMALIZATION_EPSILON};

/// Edge length of the pixel grid.
pub const DEFAULT_RESOLUTION: usize = 224;

/// Fixed channel budget of the pair-per-channel method; caps `d` at 10.
pub const CHANNEL_BUDGET: usize = 45;

/// Value stored in unoccupied pixels.
pub const BACKGROUND: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapMethod {
    /// Two-component projection of the raw design, uncentered.
    #[serde(rename = "pca")]
    Pca,
    /// Same projection computed on the design with the normalized fitness
    /// appended as an extra column.
    #[serde(rename = "pcafunc")]
    PcaFunc,
    /// One channel per coordinate pair, padded to [`CHANNEL_BUDGET`].
    #[serde(rename = "mc")]
    MultiChannel,
    /// Mean over the occupied channels of the multi-channel stack.
    #[serde(rename = "rmc")]
    ReducedMultiChannel,
}

impl MapMethod {
    pub const ALL: [MapMethod; 4] = [
        MapMethod::Pca,
        MapMethod::PcaFunc,
        MapMethod::MultiChannel,
        MapMethod::ReducedMultiChannel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapMethod::Pca => "pca",
            MapMethod::PcaFunc => "pcafunc",
            MapMethod::MultiChannel => "mc",
            MapMethod::ReducedMultiChannel => "rmc",
        }
    }
}

impl fmt::Display for MapMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pca" => Ok(MapMethod::Pca),
            "pcafunc" | "pca-func" => Ok(MapMethod::PcaFunc),
            "mc" => Ok(MapMethod::MultiChannel),
            "rmc" => Ok(MapMethod::ReducedMultiChannel),
            _ => Err(Error::UnknownMapMethod(s.to_string())),
        }
    }
}

/// `R x R x c` raster of fitness values in `[0, 1]` plus an occupancy mask.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessMap {
    pub values: Array3<f64>,
    pub occupancy: Array3<bool>,
    pub resolution: usize,
    pub method: MapMethod,
}

impl FitnessMap {
    pub fn channels(&self) -> usize {
        self.values.shape()[2]
    }

    /// Channels that contain at least one occupied pixel.
    pub fn occupied_channels(&self) -> usize {
        (0..self.channels())
            .filter(|&c| self.occupancy.slice(ndarray::s![.., .., c]).iter().any(|&o| o))
            .count()
    }

    pub fn occupied_pixels(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }
}

/// Top-two eigenpairs of the uncentered second-moment matrix.
#[derive(Debug, Clone)]
pub struct PcaBasis {
    /// `d x 2` matrix; columns are unit eigenvectors, descending eigenvalue.
    pub eigenvectors: Array2<f64>,
    /// The two leading eigenvalues, descending.
    pub eigenvalues: [f64; 2],
    /// Trace of the second-moment matrix (total uncentered variance).
    pub total_moment: f64,
}

/// A two-column projection normalized to the unit square, with the rows that
/// survived the bound check.
#[derive(Debug, Clone)]
pub struct PcaProjection {
    pub points: Array2<f64>,
    /// Row indices of the input sample that were kept.
    pub kept: Vec<usize>,
    pub basis: PcaBasis,
}

/// Eigenbasis of `S = X^T X / n` without centering.
///
/// Eigenvector signs are fixed by making the largest-magnitude component
/// positive; ties pick the lowest component index.
pub fn pca_basis(x: &Array2<f64>) -> Result<PcaBasis> {
    let (n, d) = (x.nrows(), x.ncols());
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d, min: 2 });
    }
    if n <= d {
        return Err(Error::SampleTooSmall { n, min: d + 1 });
    }
    let moment = x.t().dot(x) / n as f64;
    let total_moment = (0..d).map(|i| moment[[i, i]]).sum();
    let sym = nalgebra::DMatrix::from_fn(d, d, |r, c| moment[[r, c]]);
    let eigen = nalgebra::SymmetricEigen::try_new(sym, 1e-13, 10_000)
        .ok_or_else(|| Error::NumericalFailure("eigendecomposition did not converge".into()))?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let mut eigenvectors = Array2::zeros((d, 2));
    let mut eigenvalues = [0.0; 2];
    for (col, &idx) in order.iter().take(2).enumerate() {
        eigenvalues[col] = eigen.eigenvalues[idx];
        let v = eigen.eigenvectors.column(idx);
        let mut dominant = 0;
        for r in 1..d {
            if v[r].abs() > v[dominant].abs() {
                dominant = r;
            }
        }
        let sign = if v[dominant] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..d {
            eigenvectors[[r, col]] = sign * v[r];
        }
    }
    Ok(PcaBasis {
        eigenvectors,
        eigenvalues,
        total_moment,
    })
}

/// Projects the raw design onto its two leading uncentered components, then
/// normalizes the projection with the problem's bound envelope and drops rows
/// that leave the unit square.
pub fn project_pca(x: &Array2<f64>, bounds: &Bounds) -> Result<PcaProjection> {
    let basis = pca_basis(x)?;
    let projected = x.dot(&basis.eigenvectors);
    Ok(normalize_projection(projected, bounds, basis))
}

/// As [`project_pca`], but the components are computed on the design with the
/// normalized fitness appended as column `d`. The projected coordinates are
/// used for placement only; pixels are still colored by the fitness values.
pub fn project_pca_func(
    x: &Array2<f64>,
    y_hat: &Array1<f64>,
    bounds: &Bounds,
) -> Result<PcaProjection> {
    if y_hat.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            got: y_hat.len(),
        });
    }
    let (n, d) = (x.nrows(), x.ncols());
    let mut augmented = Array2::zeros((n, d + 1));
    augmented.slice_mut(ndarray::s![.., ..d]).assign(x);
    augmented.column_mut(d).assign(y_hat);
    let basis = pca_basis(&augmented)?;
    let projected = augmented.dot(&basis.eigenvectors);
    Ok(normalize_projection(projected, bounds, basis))
}

fn normalize_projection(projected: Array2<f64>, bounds: &Bounds, basis: PcaBasis) -> PcaProjection {
    let (lo, hi) = bounds.scalar_span();
    let denom = hi - lo + NORMALIZATION_EPSILON;
    let mut kept = Vec::new();
    let mut rows = Vec::new();
    for (i, row) in projected.rows().into_iter().enumerate() {
        let a = (row[0] - lo) / denom;
        let b = (row[1] - lo) / denom;
        if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
            kept.push(i);
            rows.push([a, b]);
        }
    }
    let mut points = Array2::zeros((rows.len(), 2));
    for (i, r) in rows.iter().enumerate() {
        points[[i, 0]] = r[0];
        points[[i, 1]] = r[1];
    }
    PcaProjection {
        points,
        kept,
        basis,
    }
}

/// Rasterizes unit-square points into a single-channel map. Colliding points
/// are mean-aggregated; pixel indices are `floor(p * R)` clamped to `R - 1`,
/// with the second coordinate as the row.
pub fn rasterize(points: &Array2<f64>, values: &Array1<f64>, resolution: usize) -> Result<FitnessMap> {
    if points.nrows() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: points.nrows(),
            got: values.len(),
        });
    }
    let mut map = FitnessMap {
        values: Array3::from_elem((resolution, resolution, 1), BACKGROUND),
        occupancy: Array3::from_elem((resolution, resolution, 1), false),
        resolution,
        method: MapMethod::Pca,
    };
    raster_channel(&mut map, 0, points.rows().into_iter().map(|r| (r[0], r[1])), values)?;
    Ok(map)
}

/// Rasterizes one channel in place, mean-aggregating collisions.
fn raster_channel(
    map: &mut FitnessMap,
    channel: usize,
    points: impl Iterator<Item = (f64, f64)>,
    values: &Array1<f64>,
) -> Result<()> {
    let r = map.resolution;
    let mut sums = vec![0.0f64; r * r];
    let mut counts = vec![0u32; r * r];
    for ((px, py), &v) in points.zip(values.iter()) {
        if !(0.0..=1.0).contains(&px) || !(0.0..=1.0).contains(&py) {
            return Err(Error::OutOfBounds { x: px, y: py });
        }
        let col = ((px * r as f64).floor() as usize).min(r - 1);
        let row = ((py * r as f64).floor() as usize).min(r - 1);
        sums[row * r + col] += v;
        counts[row * r + col] += 1;
    }
    for row in 0..r {
        for col in 0..r {
            let c = counts[row * r + col];
            if c > 0 {
                map.values[[row, col, channel]] = sums[row * r + col] / c as f64;
                map.occupancy[[row, col, channel]] = true;
            }
        }
    }
    Ok(())
}

/// Multi-channel map: one rasterized channel per coordinate pair `(i, j)`,
/// `i < j`, in lexicographic order, padded with empty channels up to
/// [`CHANNEL_BUDGET`].
pub fn map_mc(x_hat: &Array2<f64>, y_hat: &Array1<f64>, resolution: usize) -> Result<FitnessMap> {
    let d = x_hat.ncols();
    if d > 10 {
        return Err(Error::DimensionTooLarge { dim: d, max: 10 });
    }
    if d < 2 {
        return Err(Error::InvalidDimension { dim: d, min: 2 });
    }
    if x_hat.nrows() != y_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: x_hat.nrows(),
            got: y_hat.len(),
        });
    }
    let mut map = FitnessMap {
        values: Array3::from_elem((resolution, resolution, CHANNEL_BUDGET), BACKGROUND),
        occupancy: Array3::from_elem((resolution, resolution, CHANNEL_BUDGET), false),
        resolution,
        method: MapMethod::MultiChannel,
    };
    let mut channel = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let points = x_hat
                .rows()
                .into_iter()
                .map(|row| (row[i], row[j]));
            raster_channel(&mut map, channel, points, y_hat)?;
            channel += 1;
        }
    }
    Ok(map)
}

/// Reduced multi-channel map: per pixel, the mean over the channels in which
/// that pixel is occupied; pixels occupied nowhere stay background.
pub fn map_rmc(x_hat: &Array2<f64>, y_hat: &Array1<f64>, resolution: usize) -> Result<FitnessMap> {
    let stack = map_mc(x_hat, y_hat, resolution)?;
    let mut reduced = FitnessMap {
        values: Array3::from_elem((resolution, resolution, 1), BACKGROUND),
        occupancy: Array3::from_elem((resolution, resolution, 1), false),
        resolution,
        method: MapMethod::ReducedMultiChannel,
    };
    for row in 0..resolution {
        for col in 0..resolution {
            let mut sum = 0.0;
            let mut count = 0u32;
            for c in 0..stack.channels() {
                if stack.occupancy[[row, col, c]] {
                    sum += stack.values[[row, col, c]];
                    count += 1;
                }
            }
            if count > 0 {
                reduced.values[[row, col, 0]] = sum / count as f64;
                reduced.occupancy[[row, col, 0]] = true;
            }
        }
    }
    Ok(reduced)
}

/// Builds the fitness map of a sample with the requested method.
pub fn build_map(sample: &Sample, method: MapMethod, resolution: usize) -> Result<FitnessMap> {
    let y_hat = normalize_fitness(&sample.y)?;
    let mut map = match method {
        MapMethod::Pca => {
            let projection = project_pca(&sample.x, &sample.bounds)?;
            let kept_values =
                Array1::from_iter(projection.kept.iter().map(|&i| y_hat[i]));
            rasterize(&projection.points, &kept_values, resolution)?
        }
        MapMethod::PcaFunc => {
            let projection = project_pca_func(&sample.x, &y_hat, &sample.bounds)?;
            let kept_values =
                Array1::from_iter(projection.kept.iter().map(|&i| y_hat[i]));
            rasterize(&projection.points, &kept_values, resolution)?
        }
        MapMethod::MultiChannel => {
            let x_hat = normalize_design(&sample.x, &sample.bounds)?;
            map_mc(&x_hat, &y_hat, resolution)?
        }
        MapMethod::ReducedMultiChannel => {
            let x_hat = normalize_design(&sample.x, &sample.bounds)?;
            map_rmc(&x_hat, &y_hat, resolution)?
        }
    };
    map.method = method;
    Ok(map)
}

/// Sidecar metadata written next to every exported map tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSidecar {
    pub resolution: usize,
    pub channels: usize,
    pub method: MapMethod,
    /// How unoccupied data is encoded in the tensor: occupied-nowhere channels
    /// are filled with this policy ("zero"), background pixels inside occupied
    /// channels keep the white sentinel 1.0.
    pub fill_policy: String,
    pub problem_ref: ProblemRef,
    pub seed: u64,
}

/// Writes a single-channel map as a binary (P5) PGM image. Occupied pixels map
/// to `round(value * 254)`, background to 255.
pub fn write_pgm(map: &FitnessMap, path: &Path) -> Result<()> {
    if map.channels() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: map.channels(),
        });
    }
    let r = map.resolution;
    let mut bytes = Vec::with_capacity(r * r + 32);
    bytes.extend_from_slice(format!("P5\n{r} {r}\n255\n").as_bytes());
    for row in 0..r {
        for col in 0..r {
            let b = if map.occupancy[[row, col, 0]] {
                (map.values[[row, col, 0]] * 254.0).round() as u8
            } else {
                255
            };
            bytes.push(b);
        }
    }
    fs::write(path, &bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Writes the map as a flat little-endian f32 tensor, row-major and
/// channel-last. Channels without any occupied pixel are filled with zeros.
pub fn write_tensor(map: &FitnessMap, path: &Path) -> Result<()> {
    let r = map.resolution;
    let c = map.channels();
    let empty: Vec<bool> = (0..c)
        .map(|ch| !map.occupancy.slice(ndarray::s![.., .., ch]).iter().any(|&o| o))
        .collect();
    let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut writer = std::io::BufWriter::new(file);
    for row in 0..r {
        for col in 0..r {
            for ch in 0..c {
                let v = if empty[ch] {
                    0.0f32
                } else {
                    map.values[[row, col, ch]] as f32
                };
                writer
                    .write_all(&v.to_le_bytes())
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
            }
        }
    }
    writer
        .flush()
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads a tensor written by [`write_tensor`] back into `(R, R, c)` values.
pub fn read_tensor(path: &Path, resolution: usize, channels: usize) -> Result<Array3<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let expected = resolution * resolution * channels * 4;
    if bytes.len() != expected {
        return Err(Error::MalformedArtifact {
            path: path.to_path_buf(),
            reason: format!("expected {expected} bytes, found {}", bytes.len()),
        });
    }
    let mut values = Array3::zeros((resolution, resolution, channels));
    let mut offset = 0;
    for row in 0..resolution {
        for col in 0..resolution {
            for ch in 0..channels {
                let v = f32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap());
                values[[row, col, ch]] = v as f64;
                offset += 4;
            }
        }
    }
    Ok(values)
}

pub fn write_map_sidecar(sidecar: &MapSidecar, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar).expect("serializable sidecar");
    fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_map_sidecar(path: &Path) -> Result<MapSidecar> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&raw).map_err(|e| Error::MalformedArtifact {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}
