//! Reproducible experiment corpus: problem grid x repetitions x representation.
//!
//! A dataset is a directory of per-key artifacts plus a JSON manifest indexing
//! every file with its content hash. Builds are idempotent and may run with
//! any degree of parallelism; the output is bit-identical either way because
//! every key derives its own seed.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ela;
use crate::error::{Error, Result};
use crate::fitcloud::{self, CloudConfig};
use crate::fitmap::{self, MapMethod};
use crate::problems::{labels, make_problem, FunctionId, PropertyLabels};
use crate::sampling::draw_sample_rep;
use crate::seeds;

/// Identifies one work unit of the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProblemKey {
    pub function_id: FunctionId,
    pub dim: usize,
    pub instance_id: u64,
    pub repetition: u32,
}

/// Dataset split of the evaluation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Instance-id ranges defining the three splits: `1..=train_hi` trains,
/// `train_hi+1..=validation_hi` validates, `validation_hi+1..=test_hi` tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitProtocol {
    pub train_hi: u64,
    pub validation_hi: u64,
    pub test_hi: u64,
}

impl SplitProtocol {
    /// The canonical protocol: instances 1-100 train, 101-125 validate,
    /// 126-150 test.
    pub fn canonical() -> Self {
        SplitProtocol {
            train_hi: 100,
            validation_hi: 125,
            test_hi: 150,
        }
    }

    /// Desk-scale protocol with the same 4:1:1 proportions over 60 instances.
    pub fn desk() -> Self {
        SplitProtocol {
            train_hi: 40,
            validation_hi: 50,
            test_hi: 60,
        }
    }

    pub fn assign(&self, instance_id: u64) -> Result<Split> {
        if instance_id == 0 || instance_id > self.test_hi {
            return Err(Error::OutOfProtocol {
                instance_id,
                max: self.test_hi,
            });
        }
        Ok(if instance_id <= self.train_hi {
            Split::Train
        } else if instance_id <= self.validation_hi {
            Split::Validation
        } else {
            Split::Test
        })
    }
}

impl Default for SplitProtocol {
    fn default() -> Self {
        SplitProtocol::canonical()
    }
}

/// Canonical split assignment: 1-100 train, 101-125 validation, 126-150 test.
pub fn assign_split(instance_id: u64) -> Result<Split> {
    SplitProtocol::canonical().assign(instance_id)
}

/// Which artifact a dataset stores per key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    MapPca,
    MapPcafunc,
    MapMc,
    MapRmc,
    Cloud,
    Ela,
}

impl Representation {
    pub const ALL: [Representation; 6] = [
        Representation::MapPca,
        Representation::MapPcafunc,
        Representation::MapMc,
        Representation::MapRmc,
        Representation::Cloud,
        Representation::Ela,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Representation::MapPca => "map_pca",
            Representation::MapPcafunc => "map_pcafunc",
            Representation::MapMc => "map_mc",
            Representation::MapRmc => "map_rmc",
            Representation::Cloud => "cloud",
            Representation::Ela => "ela",
        }
    }

    pub fn map_method(self) -> Option<MapMethod> {
        match self {
            Representation::MapPca => Some(MapMethod::Pca),
            Representation::MapPcafunc => Some(MapMethod::PcaFunc),
            Representation::MapMc => Some(MapMethod::MultiChannel),
            Representation::MapRmc => Some(MapMethod::ReducedMultiChannel),
            _ => None,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Representation::Ela => "csv",
            _ => "bin",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "map_pca" => Ok(Representation::MapPca),
            "map_pcafunc" => Ok(Representation::MapPcafunc),
            "map_mc" => Ok(Representation::MapMc),
            "map_rmc" => Ok(Representation::MapRmc),
            "cloud" => Ok(Representation::Cloud),
            "ela" => Ok(Representation::Ela),
            _ => Err(Error::UnknownRepresentation(s.to_string())),
        }
    }
}

/// How many points to draw per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSizePolicy {
    Fixed(usize),
    PerDimFactor(usize),
}

impl SampleSizePolicy {
    pub fn size_for(&self, dim: usize) -> usize {
        match self {
            SampleSizePolicy::Fixed(n) => *n,
            SampleSizePolicy::PerDimFactor(factor) => factor * dim,
        }
    }
}

/// Full build configuration; recorded verbatim in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub suite: Vec<FunctionId>,
    pub dims: Vec<usize>,
    /// Inclusive instance-id range.
    pub instances: (u64, u64),
    pub repetitions: u32,
    pub representation: Representation,
    pub sample_size: SampleSizePolicy,
    pub resolution: usize,
    pub cloud: CloudConfig,
    pub global_seed: u64,
    pub split: SplitProtocol,
}

impl DatasetConfig {
    /// Defaults for the given representation under the canonical protocol:
    /// all six functions, dims 2/3/5/10, instances 1-150, ten repetitions.
    pub fn canonical(representation: Representation) -> Self {
        DatasetConfig {
            suite: FunctionId::ALL.to_vec(),
            dims: vec![2, 3, 5, 10],
            instances: (1, 150),
            repetitions: 10,
            representation,
            sample_size: default_sample_size(representation),
            resolution: fitmap::DEFAULT_RESOLUTION,
            cloud: CloudConfig::default(),
            global_seed: 0,
            split: SplitProtocol::canonical(),
        }
    }

    /// Desk-scale configuration: six functions, dims 2 and 3, instances 1-60,
    /// two repetitions (1440 keys), with the proportionally scaled splits.
    pub fn desk(representation: Representation) -> Self {
        DatasetConfig {
            dims: vec![2, 3],
            instances: (1, 60),
            repetitions: 2,
            split: SplitProtocol::desk(),
            ..DatasetConfig::canonical(representation)
        }
    }

    /// All keys of the grid, sorted.
    pub fn keys(&self) -> Vec<ProblemKey> {
        let mut keys = Vec::new();
        for &function_id in &self.suite {
            for &dim in &self.dims {
                for instance_id in self.instances.0..=self.instances.1 {
                    for repetition in 1..=self.repetitions {
                        keys.push(ProblemKey {
                            function_id,
                            dim,
                            instance_id,
                            repetition,
                        });
                    }
                }
            }
        }
        keys.sort();
        keys
    }
}

fn default_sample_size(representation: Representation) -> SampleSizePolicy {
    match representation {
        Representation::Ela => SampleSizePolicy::PerDimFactor(250),
        Representation::Cloud => SampleSizePolicy::Fixed(100),
        _ => SampleSizePolicy::Fixed(1000),
    }
}

/// Reads the global seed from the `LANDSCAPE_SEED` environment variable.
pub fn global_seed_from_env() -> Option<u64> {
    std::env::var("LANDSCAPE_SEED").ok()?.trim().parse().ok()
}

/// Per-key sampling seed: the global seed folded with the key fields.
pub fn derive_key_seed(global_seed: u64, key: &ProblemKey) -> u64 {
    seeds::derive_seed(
        global_seed,
        &[
            key.function_id.code(),
            key.dim as u64,
            key.instance_id,
            key.repetition as u64,
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub key: ProblemKey,
    /// Artifact path relative to the dataset root.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub seed_rule: String,
    pub config: DatasetConfig,
    pub entries: Vec<ManifestEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";
const SEED_RULE: &str = "splitmix64-fold-v1";

impl DatasetManifest {
    pub fn entries_for_split(&self, split: Split) -> Result<Vec<&ManifestEntry>> {
        let mut out = Vec::new();
        for entry in &self.entries {
            if self.config.split.assign(entry.key.instance_id)? == split {
                out.push(entry);
            }
        }
        Ok(out)
    }
}

pub fn save_manifest(manifest: &DatasetManifest, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(manifest).expect("serializable manifest");
    fs::write(&path, json).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(path)
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::from_str(&raw).map_err(|e| Error::MalformedArtifact {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Builds (or resumes) the dataset under `out_dir` with `jobs` worker threads.
///
/// Artifacts already present with a matching hash in an existing manifest for
/// the same configuration are kept. The resulting manifest is independent of
/// `jobs`.
pub fn build_dataset(config: &DatasetConfig, out_dir: &Path, jobs: usize) -> Result<DatasetManifest> {
    let sub = out_dir.join(config.representation.name());
    fs::create_dir_all(&sub).map_err(|e| Error::io(sub.display().to_string(), e))?;

    let previous: HashMap<ProblemKey, ManifestEntry> = match load_manifest(&out_dir.join(MANIFEST_FILE)) {
        Ok(m) if m.config == *config => m.entries.into_iter().map(|e| (e.key, e)).collect(),
        _ => HashMap::new(),
    };

    let keys = config.keys();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::NumericalFailure(format!("thread pool: {e}")))?;
    let mut entries: Vec<ManifestEntry> = pool.install(|| {
        keys.par_iter()
            .map(|key| build_key(config, out_dir, key, &previous))
            .collect::<Result<Vec<_>>>()
    })?;
    entries.sort_by_key(|e| e.key);

    let manifest = DatasetManifest {
        schema_version: 1,
        seed_rule: SEED_RULE.to_string(),
        config: config.clone(),
        entries,
    };
    save_manifest(&manifest, out_dir)?;
    Ok(manifest)
}

fn artifact_relative_path(config: &DatasetConfig, key: &ProblemKey) -> String {
    format!(
        "{}/{}_d{:02}_i{:03}_r{}.{}",
        config.representation.name(),
        key.function_id,
        key.dim,
        key.instance_id,
        key.repetition,
        config.representation.extension(),
    )
}

fn build_key(
    config: &DatasetConfig,
    out_dir: &Path,
    key: &ProblemKey,
    previous: &HashMap<ProblemKey, ManifestEntry>,
) -> Result<ManifestEntry> {
    let rel = artifact_relative_path(config, key);
    let path = out_dir.join(&rel);
    if let Some(prev) = previous.get(key) {
        if prev.path == rel && path.exists() && hash_file(&path)? == prev.sha256 {
            return Ok(prev.clone());
        }
    }

    let seed = derive_key_seed(config.global_seed, key);
    let problem = make_problem(key.function_id, key.dim, key.instance_id)?;
    let n = config.sample_size.size_for(key.dim);
    let sample = draw_sample_rep(&problem, n, seed, key.repetition)?;

    match config.representation {
        Representation::Ela => {
            let vector = ela::feature_vector(&sample);
            ela::write_features_csv(&path, &[vector])?;
        }
        Representation::Cloud => {
            let embedding = fitcloud::embed_cloud(&sample, &config.cloud)?;
            fitcloud::write_cloud_tensor(&embedding, &path)?;
            let sidecar = fitcloud::CloudSidecar {
                n: embedding.n_points,
                k: config.cloud.k,
                p: config.cloud.norm.to_string(),
                delta_max: config.cloud.delta_max,
                d_max: config.cloud.d_max,
                width: config.cloud.row_width(),
                problem_ref: sample.problem_ref,
                seed,
            };
            fitcloud::write_cloud_sidecar(&sidecar, &path.with_extension("json"))?;
        }
        _ => {
            let method = config
                .representation
                .map_method()
                .expect("map representation");
            let map = fitmap::build_map(&sample, method, config.resolution)?;
            fitmap::write_tensor(&map, &path)?;
            let sidecar = fitmap::MapSidecar {
                resolution: map.resolution,
                channels: map.channels(),
                method,
                fill_policy: "zero".to_string(),
                problem_ref: sample.problem_ref,
                seed,
            };
            fitmap::write_map_sidecar(&sidecar, &path.with_extension("json"))?;
        }
    }

    Ok(ManifestEntry {
        key: *key,
        path: rel,
        sha256: hash_file(&path)?,
    })
}

/// Hex SHA-256 of a file's content.
pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// One split's worth of loaded rows with their labels and keys, aligned.
#[derive(Debug, Clone)]
pub struct LabeledMatrix {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<PropertyLabels>,
    pub keys: Vec<ProblemKey>,
}

impl LabeledMatrix {
    fn new() -> Self {
        LabeledMatrix {
            rows: Vec::new(),
            labels: Vec::new(),
            keys: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// All three splits after loading and column elimination.
#[derive(Debug, Clone)]
pub struct ProtocolData {
    pub train: LabeledMatrix,
    pub validation: LabeledMatrix,
    pub test: LabeledMatrix,
    /// Indices of the artifact columns that survived elimination.
    pub kept_columns: Vec<usize>,
}

/// Loads every artifact of the manifest through `loader`, assigns splits, and
/// eliminates any column that is missing in at least one row of any split.
/// Labels come from the function-id table.
pub fn load_protocol<F>(
    manifest: &DatasetManifest,
    root: &Path,
    loader: F,
) -> Result<ProtocolData>
where
    F: Fn(&Path) -> Result<Vec<Option<f64>>> + Sync,
{
    let raw: Vec<(Split, &ManifestEntry, Vec<Option<f64>>)> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let split = manifest.config.split.assign(entry.key.instance_id)?;
            let row = loader(&root.join(&entry.path))?;
            Ok((split, entry, row))
        })
        .collect::<Result<Vec<_>>>()?;

    let width = raw.first().map(|(_, _, r)| r.len()).unwrap_or(0);
    for (_, entry, row) in &raw {
        if row.len() != width {
            return Err(Error::MalformedArtifact {
                path: root.join(&entry.path),
                reason: format!("row width {} differs from {width}", row.len()),
            });
        }
    }
    let kept_columns: Vec<usize> = (0..width)
        .filter(|&j| raw.iter().all(|(_, _, row)| row[j].is_some()))
        .collect();

    let mut data = ProtocolData {
        train: LabeledMatrix::new(),
        validation: LabeledMatrix::new(),
        test: LabeledMatrix::new(),
        kept_columns,
    };
    for (split, entry, row) in raw {
        let dense: Vec<f64> = data
            .kept_columns
            .iter()
            .map(|&j| row[j].expect("kept column"))
            .collect();
        let bucket = match split {
            Split::Train => &mut data.train,
            Split::Validation => &mut data.validation,
            Split::Test => &mut data.test,
        };
        bucket.rows.push(dense);
        bucket.labels.push(labels(entry.key.function_id));
        bucket.keys.push(entry.key);
    }
    Ok(data)
}

/// Loads one split (applying the global column-elimination policy), failing if
/// it is empty.
pub fn load_split<F>(
    manifest: &DatasetManifest,
    root: &Path,
    split: Split,
    loader: F,
) -> Result<LabeledMatrix>
where
    F: Fn(&Path) -> Result<Vec<Option<f64>>> + Sync,
{
    let data = load_protocol(manifest, root, loader)?;
    let matrix = match split {
        Split::Train => data.train,
        Split::Validation => data.validation,
        Split::Test => data.test,
    };
    if matrix.is_empty() {
        return Err(Error::EmptySplit(split.name().to_string()));
    }
    Ok(matrix)
}

/// Loader for feature CSV artifacts (one row per file).
pub fn ela_row_loader(path: &Path) -> Result<Vec<Option<f64>>> {
    let (_, mut rows) = ela::read_features_csv(path)?;
    rows.pop().ok_or_else(|| Error::MalformedArtifact {
        path: path.to_path_buf(),
        reason: "no feature row".to_string(),
    })
}
