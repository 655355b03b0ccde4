//! Transformer-ready fitness-cloud embeddings.
//!
//! Every sample point is concatenated with its `k - 1` nearest neighbors
//! (coordinates and normalized fitness), zero-padded to a fixed maximum
//! dimensionality, and tagged with a validity indicator marking which
//! coordinates are real.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{normalize_design, normalize_fitness, ProblemRef, Sample};

/// Coordinate blocks are padded to this many dimensions.
pub const DEFAULT_D_MAX: usize = 10;

/// Distance used for the neighbor search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Norm {
    #[serde(rename = "1")]
    L1,
    #[serde(rename = "2")]
    L2,
    #[serde(rename = "inf")]
    LInf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Norm::L2 => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::LInf => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::L1 => f.write_str("1"),
            Norm::L2 => f.write_str("2"),
            Norm::LInf => f.write_str("inf"),
        }
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" => Ok(Norm::L1),
            "2" => Ok(Norm::L2),
            "inf" | "max" | "infinity" => Ok(Norm::LInf),
            _ => Err(Error::InvalidNorm(s.to_string())),
        }
    }
}

/// Embedding parameters. The defaults follow the ablation outcome:
/// `k = 5`, maximum norm, clamp distance 1.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudConfig {
    /// Neighborhood size including the point itself.
    pub k: usize,
    pub norm: Norm,
    /// Neighbors farther than this are replaced by the previous accepted one.
    pub delta_max: f64,
    pub d_max: usize,
}

impl Default for CloudConfig {
    fn default() -> Self {
        CloudConfig {
            k: 5,
            norm: Norm::LInf,
            delta_max: 1.5,
            d_max: DEFAULT_D_MAX,
        }
    }
}

impl CloudConfig {
    /// Width of one embedded row: `k * (d_max + 1) + d_max`.
    pub fn row_width(&self) -> usize {
        self.k * (self.d_max + 1) + self.d_max
    }
}

/// The embedded point set plus the validity indicator shared by all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudEmbedding {
    /// `n x (k * (d_max + 1) + d_max)` matrix. Row `i` holds, for each of the
    /// `k` neighbors of point `i` (self first), the padded coordinates and the
    /// normalized fitness, followed by the indicator block.
    pub embedded: Array2<f64>,
    /// 1 in the first `d` positions, 0 in the padded ones.
    pub indicator: Array1<f64>,
    pub n_points: usize,
    pub config: CloudConfig,
}

/// Builds the `n x k` neighbor-index matrix.
///
/// Row `i` starts with `i` itself, followed by the remaining points ordered by
/// non-decreasing distance (ties broken by lower point index). Scanning the
/// row left to right, any neighbor farther than `delta_max` is overwritten
/// with the entry to its left, so a far tail collapses onto the last accepted
/// neighbor.
pub fn knn_graph(
    points: &Array2<f64>,
    k: usize,
    norm: Norm,
    delta_max: f64,
) -> Result<Array2<usize>> {
    let n = points.nrows();
    if k > n {
        return Err(Error::NeighborhoodTooLarge { k, n });
    }
    if k == 0 {
        return Err(Error::NeighborhoodTooLarge { k, n });
    }
    let rows: Vec<Vec<f64>> = points
        .rows()
        .into_iter()
        .map(|r| r.to_vec())
        .collect();
    let mut graph = Array2::zeros((n, k));
    let mut candidates: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        candidates.clear();
        for (j, row) in rows.iter().enumerate() {
            if j != i {
                candidates.push((norm.distance(&rows[i], row), j));
            }
        }
        candidates.sort_unstable_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite distances")
                .then(a.1.cmp(&b.1))
        });
        graph[[i, 0]] = i;
        for t in 1..k {
            let (dist, j) = candidates[t - 1];
            graph[[i, t]] = if dist > delta_max { graph[[i, t - 1]] } else { j };
        }
    }
    Ok(graph)
}

/// Embeds a sample into its local neighborhoods.
///
/// Coordinates are normalized to the unit cube, zero-padded to `d_max`
/// dimensions, and the neighbor graph is built on the padded coordinates (for
/// the maximum norm this is provably identical to the unpadded graph). The
/// fitness values reuse the coordinate neighbor graph.
pub fn embed_cloud(sample: &Sample, config: &CloudConfig) -> Result<CloudEmbedding> {
    let (n, d) = (sample.n(), sample.dim());
    if d > config.d_max {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: config.d_max,
        });
    }
    if config.k > n {
        return Err(Error::NeighborhoodTooLarge { k: config.k, n });
    }
    let x_hat = normalize_design(&sample.x, &sample.bounds)?;
    let y_hat = normalize_fitness(&sample.y)?;
    let mut padded = Array2::zeros((n, config.d_max));
    padded.slice_mut(ndarray::s![.., ..d]).assign(&x_hat);
    let graph = knn_graph(&padded, config.k, config.norm, config.delta_max)?;

    let width = config.row_width();
    let mut embedded = Array2::zeros((n, width));
    let mut indicator = Array1::zeros(config.d_max);
    for j in 0..d {
        indicator[j] = 1.0;
    }
    for i in 0..n {
        let mut col = 0;
        for t in 0..config.k {
            let j = graph[[i, t]];
            for c in 0..config.d_max {
                embedded[[i, col]] = padded[[j, c]];
                col += 1;
            }
            embedded[[i, col]] = y_hat[j];
            col += 1;
        }
        for c in 0..config.d_max {
            embedded[[i, col]] = indicator[c];
            col += 1;
        }
    }
    Ok(CloudEmbedding {
        embedded,
        indicator,
        n_points: n,
        config: *config,
    })
}

/// Sidecar metadata written next to every exported cloud tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudSidecar {
    pub n: usize,
    pub k: usize,
    pub p: String,
    pub delta_max: f64,
    pub d_max: usize,
    pub width: usize,
    pub problem_ref: ProblemRef,
    pub seed: u64,
}

/// Writes the embedding as a flat little-endian f32 tensor, row-major.
pub fn write_cloud_tensor(embedding: &CloudEmbedding, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut writer = std::io::BufWriter::new(file);
    for v in embedding.embedded.iter() {
        writer
            .write_all(&(*v as f32).to_le_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    writer
        .flush()
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Reads a tensor written by [`write_cloud_tensor`].
pub fn read_cloud_tensor(path: &Path, n: usize, width: usize) -> Result<Array2<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let expected = n * width * 4;
    if bytes.len() != expected {
        return Err(Error::MalformedArtifact {
            path: path.to_path_buf(),
            reason: format!("expected {expected} bytes, found {}", bytes.len()),
        });
    }
    let mut out = Array2::zeros((n, width));
    let mut offset = 0;
    for i in 0..n {
        for j in 0..width {
            out[[i, j]] = f32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap()) as f64;
            offset += 4;
        }
    }
    Ok(out)
}

pub fn write_cloud_sidecar(sidecar: &CloudSidecar, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(sidecar).expect("serializable sidecar");
    fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_cloud_sidecar(path: &Path) -> Result<CloudSidecar> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&raw).map_err(|e| Error::MalformedArtifact {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_problem, FunctionId};
    use crate::sampling::draw_sample;
    use ndarray::array;
    use proptest::prelude::*;

    /// Exhaustive all-pairs reference for the neighbor graph.
    fn brute_force_graph(
        points: &Array2<f64>,
        k: usize,
        norm: Norm,
        delta_max: f64,
    ) -> Array2<usize> {
        let n = points.nrows();
        let mut graph = Array2::zeros((n, k));
        for i in 0..n {
            let me = points.row(i).to_vec();
            let mut all: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (norm.distance(&me, &points.row(j).to_vec()), j))
                .collect();
            all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
            graph[[i, 0]] = i;
            for t in 1..k {
                graph[[i, t]] = if all[t - 1].0 > delta_max {
                    graph[[i, t - 1]]
                } else {
                    all[t - 1].1
                };
            }
        }
        graph
    }

    #[test]
    fn k_one_is_all_self() {
        let points = array![[0.0], [0.3], [0.9]];
        let graph = knn_graph(&points, 1, Norm::LInf, 1.5).unwrap();
        for i in 0..3 {
            assert_eq!(graph[[i, 0]], i);
        }
    }

    #[test]
    fn clamping_collapses_far_neighbors() {
        let points = array![[0.0], [0.1], [5.0]];
        let graph = knn_graph(&points, 2, Norm::LInf, 1.5).unwrap();
        // Point 2 is 4.9 away from its nearest other point, over the limit.
        assert_eq!(graph.row(2).to_vec(), vec![2, 2]);
        // Point 0 keeps its neighbor at distance 0.1.
        assert_eq!(graph.row(0).to_vec(), vec![0, 1]);
    }

    #[test]
    fn clamp_tail_repeats_last_accepted_neighbor() {
        // Neighbors at 0.5 and 1.0 are in range, 3.0 and 4.0 are not: the row
        // must end with the last accepted index repeated.
        let points = array![[0.0], [0.5], [1.0], [3.0], [4.0]];
        let graph = knn_graph(&points, 5, Norm::L1, 1.5).unwrap();
        assert_eq!(graph.row(0).to_vec(), vec![0, 1, 2, 2, 2]);
    }

    #[test]
    fn neighborhood_larger_than_sample_is_rejected() {
        let points = array![[0.0], [1.0]];
        assert!(matches!(
            knn_graph(&points, 3, Norm::L2, 1.0),
            Err(Error::NeighborhoodTooLarge { .. })
        ));
    }

    #[test]
    fn infinite_delta_equals_raw_graph_and_zero_collapses() {
        let p = make_problem(FunctionId::F1, 3, 1).unwrap();
        let s = draw_sample(&p, 40, 5).unwrap();
        let x_hat = normalize_design(&s.x, &s.bounds).unwrap();
        for norm in [Norm::L1, Norm::L2, Norm::LInf] {
            let raw = knn_graph(&x_hat, 5, norm, f64::INFINITY).unwrap();
            let brute = brute_force_graph(&x_hat, 5, norm, f64::INFINITY);
            assert_eq!(raw, brute);
            let collapsed = knn_graph(&x_hat, 5, norm, 0.0).unwrap();
            for i in 0..s.n() {
                assert!(collapsed.row(i).iter().all(|&j| j == i));
            }
        }
    }

    #[test]
    fn padding_is_neutral_under_max_norm() {
        let p = make_problem(FunctionId::F3, 3, 2).unwrap();
        let s = draw_sample(&p, 60, 8).unwrap();
        let x_hat = normalize_design(&s.x, &s.bounds).unwrap();
        let mut padded = Array2::zeros((s.n(), DEFAULT_D_MAX));
        padded.slice_mut(ndarray::s![.., ..3]).assign(&x_hat);
        let a = knn_graph(&x_hat, 5, Norm::LInf, 1.5).unwrap();
        let b = knn_graph(&padded, 5, Norm::LInf, 1.5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn embedding_width_and_indicator() {
        let p = make_problem(FunctionId::F8, 3, 1).unwrap();
        let s = draw_sample(&p, 100, 3).unwrap();
        for (k, width) in [(3usize, 43usize), (5, 65)] {
            let config = CloudConfig {
                k,
                ..CloudConfig::default()
            };
            let emb = embed_cloud(&s, &config).unwrap();
            assert_eq!(emb.embedded.ncols(), width);
            assert_eq!(emb.embedded.nrows(), 100);
            assert_eq!(
                emb.indicator.to_vec(),
                vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
            );
            // The indicator block is appended to every row.
            let row = emb.embedded.row(0);
            let tail = &row.as_slice().unwrap()[width - 10..];
            assert_eq!(tail, emb.indicator.as_slice().unwrap());
        }
    }

    #[test]
    fn rows_start_with_the_point_itself() {
        let p = make_problem(FunctionId::F1, 2, 1).unwrap();
        let s = draw_sample(&p, 50, 9).unwrap();
        let config = CloudConfig::default();
        let emb = embed_cloud(&s, &config).unwrap();
        let x_hat = normalize_design(&s.x, &s.bounds).unwrap();
        let y_hat = normalize_fitness(&s.y).unwrap();
        for i in 0..s.n() {
            let row = emb.embedded.row(i);
            assert_eq!(row[0], x_hat[[i, 0]]);
            assert_eq!(row[1], x_hat[[i, 1]]);
            for c in 2..DEFAULT_D_MAX {
                assert_eq!(row[c], 0.0, "padded coordinate must be zero");
            }
            assert_eq!(row[DEFAULT_D_MAX], y_hat[i]);
        }
    }

    #[test]
    fn dimension_over_d_max_is_rejected() {
        let p = make_problem(FunctionId::F1, 11, 0).unwrap();
        let s = draw_sample(&p, 30, 1).unwrap();
        assert!(matches!(
            embed_cloud(&s, &CloudConfig::default()),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn cloud_tensor_round_trips() {
        let p = make_problem(FunctionId::F20, 2, 4).unwrap();
        let s = draw_sample(&p, 50, 6).unwrap();
        let emb = embed_cloud(&s, &CloudConfig::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cloud.bin");
        write_cloud_tensor(&emb, &path).unwrap();
        let restored = read_cloud_tensor(&path, 50, emb.config.row_width()).unwrap();
        for (a, b) in emb.embedded.iter().zip(restored.iter()) {
            assert_eq!(*a as f32 as f64, *b);
        }
    }

    proptest! {
        #[test]
        fn matches_brute_force_oracle(
            flat in proptest::collection::vec(0.0..1.0f64, 2 * 20),
            k in 1usize..8,
            norm_pick in 0usize..3,
            delta in prop_oneof![Just(0.05f64), Just(0.3), Just(f64::INFINITY)],
        ) {
            let points = Array2::from_shape_vec((20, 2), flat).unwrap();
            let norm = [Norm::L1, Norm::L2, Norm::LInf][norm_pick];
            let got = knn_graph(&points, k, norm, delta).unwrap();
            let want = brute_force_graph(&points, k, norm, delta);
            prop_assert_eq!(got, want);
        }

        #[test]
        fn embedding_is_permutation_equivariant(seed in 0u64..50) {
            let p = make_problem(FunctionId::F1, 2, 1).unwrap();
            let s = draw_sample(&p, 20, seed).unwrap();
            let config = CloudConfig { k: 4, ..CloudConfig::default() };
            let base = embed_cloud(&s, &config).unwrap();

            // Reverse the rows and re-embed.
            let n = s.n();
            let mut x_rev = Array2::zeros((n, 2));
            let mut y_rev = Array1::zeros(n);
            for i in 0..n {
                x_rev.row_mut(i).assign(&s.x.row(n - 1 - i));
                y_rev[i] = s.y[n - 1 - i];
            }
            let reversed_sample = Sample { x: x_rev, y: y_rev, ..s.clone() };
            let reversed = embed_cloud(&reversed_sample, &config).unwrap();
            for i in 0..n {
                let a = base.embedded.row(i);
                let b = reversed.embedded.row(n - 1 - i);
                prop_assert_eq!(a, b);
            }
        }
    }
}
