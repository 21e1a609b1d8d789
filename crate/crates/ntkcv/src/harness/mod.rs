//! Experiment orchestration: training runs with periodic
//! collective-variable measurement, architecture-grid scans, and
//! learning-regime classification.

mod regime;
mod scan;

pub use regime::{classify_regime, RegimeKind, RegimeLabel, DEFAULT_SMOOTHING_WINDOW};
pub use scan::{run_architecture_scan, CellResult, ScanGrid, ScanResult};

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{self, fixture, synth, Dataset, NormScheme};
use crate::error::{Error, Result};
use crate::nn::loss::{loss_from_outputs, LossKind, Target};
use crate::nn::optim::{Optimizer, OptimizerConfig};
use crate::nn::{build_network, NetKind, Network, NetworkSpec};
use crate::ntk::{self, SubsampleConfig};
use crate::spectral::{CollectiveVariables, Provenance, Split};

/// How the NTK is measured: exact pool kernel or the subsampled protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NtkMode {
    Exact,
    Subsampled { m: usize, s: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    /// Epochs between CV measurements.
    pub cadence: usize,
    pub mode: NtkMode,
    pub splits: Vec<Split>,
    /// Size of the fixed measurement pool per split (capped at 500).
    pub pool_size: usize,
}

impl MeasurementConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cadence == 0 {
            return Err(Error::Config("measurement.cadence must be >= 1".into()));
        }
        if self.splits.is_empty() {
            return Err(Error::Config("measurement.splits must be nonempty".into()));
        }
        if self.pool_size == 0 || self.pool_size > 500 {
            return Err(Error::Config(format!(
                "measurement.pool_size must lie in 1..=500, got {}",
                self.pool_size
            )));
        }
        if let NtkMode::Subsampled { m, s } = self.mode {
            if m == 0 || s == 0 {
                return Err(Error::Config("subsampled mode requires m >= 1 and s >= 1".into()));
            }
        }
        Ok(())
    }
}

impl Default for MeasurementConfig {
    fn default() -> Self {
        MeasurementConfig {
            cadence: 1,
            mode: NtkMode::Exact,
            splits: vec![Split::Train, Split::Test],
            pool_size: 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataConfig {
    /// One of: `mnist-fixture`, `mnist`, `synthetic-regression`.
    pub name: String,
    /// Training-set size; an equally sized test set is held out.
    pub subset: usize,
    pub seed: u64,
    pub loss: LossKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub network: NetworkSpec,
    pub optimizer: OptimizerConfig,
    pub data: DataConfig,
    pub epochs: usize,
    pub measurement: MeasurementConfig,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.optimizer.validate()?;
        self.measurement.validate()?;
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.data.subset < 2 {
            return Err(Error::Config("data.subset must be >= 2".into()));
        }
        Ok(())
    }
}

/// One measurement row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub epoch: usize,
    pub split: Split,
    pub loss: f64,
    pub cv: CollectiveVariables,
}

/// Time series of measurements for one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub config: ExperimentConfig,
    pub records: Vec<MeasurementRecord>,
    pub diverged: bool,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl TrajectoryRecord {
    /// (epoch, entropy) series for one split.
    pub fn entropy_series(&self, split: Split) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter(|r| r.split == split)
            .map(|r| (r.epoch, r.cv.entropy))
            .collect()
    }

    pub fn trace_series(&self, split: Split) -> Vec<(usize, f64)> {
        self.records
            .iter()
            .filter(|r| r.split == split)
            .map(|r| (r.epoch, r.cv.trace))
            .collect()
    }
}

/// Splitmix64-style seed derivation for independent RNG streams.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut z = base;
    for &p in parts {
        z = z.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(p.wrapping_mul(0xbf58476d1ce4e5b9));
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

/// Resolve the dataset reference into disjoint train/test splits sized
/// `subset` each, normalized and shaped for the network kind.
pub fn resolve_dataset(cfg: &DataConfig, kind: NetKind) -> Result<(Dataset, Dataset)> {
    let flat = kind == NetKind::Dense;
    let n = cfg.subset;
    match cfg.name.as_str() {
        "mnist-fixture" => {
            let base = fixture::fixture_dataset(2 * n, flat)?;
            data::split_train_test(&base, n, derive_seed(cfg.seed, &[1]))
        }
        "mnist" => {
            let dir = std::env::var("NTKCV_DATA_DIR").unwrap_or_else(|_| "data".into());
            let dir = std::path::Path::new(&dir);
            let images = data::idx::load_idx(&dir.join("train-images-idx3-ubyte"))?;
            let labels = data::idx::load_idx(&dir.join("train-labels-idx1-ubyte"))?;
            if images.dims.len() != 3 || labels.dims.len() != 1 || images.dims[0] != labels.dims[0] {
                return Err(Error::Format {
                    offset: 0,
                    message: "mnist image/label tensors do not line up".into(),
                });
            }
            let (h, w) = (images.dims[1], images.dims[2]);
            let px = h * w;
            let inputs: Vec<Vec<f64>> = (0..images.dims[0])
                .map(|i| images.data[i * px..(i + 1) * px].iter().map(|&b| b as f64).collect())
                .collect();
            let targets: Vec<Target> =
                labels.data.iter().map(|&c| Target::Class(c as usize)).collect();
            let input_dim = if flat {
                crate::nn::InputDim::Flat(px)
            } else {
                crate::nn::InputDim::Image { h, w, c: 1 }
            };
            let full = Dataset {
                inputs,
                targets,
                input_dim,
                num_classes: Some(10),
                normalization: None,
            };
            let full = data::normalize(&full, NormScheme::PixelUnit)?;
            let pool = data::subset(&full, (2 * n).min(full.len()), derive_seed(cfg.seed, &[2]))?;
            data::split_train_test(&pool, n, derive_seed(cfg.seed, &[1]))
        }
        "synthetic-regression" => {
            let base = synth::make_synthetic_regression(2 * n, cfg.seed)?;
            data::split_train_test(&base, n, derive_seed(cfg.seed, &[1]))
        }
        other => Err(Error::Config(format!("unknown dataset `{other}`"))),
    }
}

/// Fixed measurement pool: a seeded sample of at most `pool_size` points.
fn measurement_pool(split_data: &Dataset, pool_size: usize, seed: u64) -> Result<Dataset> {
    let k = pool_size.min(split_data.len());
    data::subset(split_data, k, seed)
}

fn measure_cv(
    network: &Network,
    pool: &Dataset,
    mode: NtkMode,
    split: Split,
    epoch: usize,
    base_seed: u64,
) -> Result<CollectiveVariables> {
    let refs = pool.input_refs();
    match mode {
        NtkMode::Exact => {
            let kernel = ntk::compute_ntk(network, &refs)?;
            ntk::collective_variables(&kernel, split, epoch)
        }
        NtkMode::Subsampled { m, s } => {
            let cfg = SubsampleConfig {
                num_samples: m,
                sample_size: s.min(pool.len()),
                seed: derive_seed(base_seed, &[epoch as u64, split as u64 + 10]),
            };
            let summary = ntk::subsampled_cv(network, &refs, &cfg)?;
            Ok(CollectiveVariables {
                entropy: summary.entropy_mean,
                trace: summary.trace_mean,
                n_points: cfg.sample_size,
                provenance: Provenance::Subsampled {
                    m: cfg.num_samples,
                    s: cfg.sample_size,
                },
                split,
                epoch,
            })
        }
    }
}

fn split_loss(network: &Network, dataset: &Dataset, loss: LossKind) -> Result<f64> {
    let refs = dataset.input_refs();
    let outputs = network.batch_forward(&refs)?;
    Ok(loss_from_outputs(&outputs, &dataset.targets, loss)?.batch_loss)
}

/// Train per the config, measuring loss and CVs at epoch 0 and then
/// every `cadence` epochs (and always at the final epoch), with the NTK
/// evaluated at the current parameters before that epoch's updates.
/// Non-finite loss aborts and returns the partial trajectory flagged
/// diverged.
pub fn run_training_experiment(cfg: &ExperimentConfig) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let (train, test) = resolve_dataset(&cfg.data, cfg.network.kind)?;
    let mut network = build_network(&cfg.network, cfg.seed)?;
    let mut optimizer = Optimizer::new(cfg.optimizer, network.param_count())?;
    let loss_kind = cfg.data.loss;

    let mut pools = Vec::new();
    for &split in &cfg.measurement.splits {
        let (source, tag) = match split {
            Split::Train => (&train, 0u64),
            Split::Test => (&test, 1u64),
        };
        pools.push((
            split,
            source.clone(),
            measurement_pool(source, cfg.measurement.pool_size, derive_seed(cfg.seed, &[100 + tag]))?,
        ));
    }

    let mut train_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[7]));
    let train_refs = train.input_refs();
    let mut records = Vec::new();
    let mut diverged = false;

    'epochs: for epoch in 0..=cfg.epochs {
        let measure_now = epoch % cfg.measurement.cadence == 0 || epoch == cfg.epochs;
        if measure_now {
            for (split, source, pool) in &pools {
                let loss = split_loss(&network, source, loss_kind)?;
                if !loss.is_finite() {
                    diverged = true;
                    break 'epochs;
                }
                let cv = measure_cv(&network, pool, cfg.measurement.mode, *split, epoch, cfg.seed)?;
                records.push(MeasurementRecord {
                    epoch,
                    split: *split,
                    loss,
                    cv,
                });
            }
        }
        if epoch == cfg.epochs || diverged {
            break;
        }
        // one training epoch
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut train_rng);
        for batch in order.chunks(cfg.optimizer.batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| train_refs[i]).collect();
            let ys: Vec<Target> = batch.iter().map(|&i| train.targets[i].clone()).collect();
            let outputs = network.batch_forward(&xs)?;
            let lg = loss_from_outputs(&outputs, &ys, loss_kind)?;
            if !lg.batch_loss.is_finite() {
                diverged = true;
                break 'epochs;
            }
            let grad = network.batch_gradient(&xs, &lg.per_point)?;
            network = optimizer.step(&network, &grad)?;
        }
    }

    Ok(TrajectoryRecord {
        config: cfg.clone(),
        records,
        diverged,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
