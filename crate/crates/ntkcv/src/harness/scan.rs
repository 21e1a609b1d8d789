//! Architecture-grid scans: one training run per (width, depth,
//! activation) cell, aggregated into init/final CV surfaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{derive_seed, run_training_experiment, ExperimentConfig, TrajectoryRecord};
use crate::nn::Activation;
use crate::spectral::{CollectiveVariables, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub widths: Vec<usize>,
    pub depths: Vec<usize>,
    pub activations: Vec<Activation>,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if self.widths.is_empty() || self.depths.is_empty() || self.activations.is_empty() {
            return Err(Error::Config("scan axes must all be nonempty".into()));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(usize, usize, Activation)> {
        let mut out = Vec::new();
        for &w in &self.widths {
            for &d in &self.depths {
                for &a in &self.activations {
                    out.push((w, d, a));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub width: usize,
    pub depth: usize,
    pub activation: Activation,
    pub trajectory: Option<TrajectoryRecord>,
    pub error: Option<String>,
    pub init_cvs: Vec<CollectiveVariables>,
    pub final_cvs: Vec<CollectiveVariables>,
    pub final_losses: Vec<(Split, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub base: ExperimentConfig,
    pub cells: Vec<CellResult>,
}

/// The config a grid cell runs with: the base config with the network
/// axes replaced and an RNG stream derived from base seed + coordinates.
pub fn cell_config(
    base: &ExperimentConfig,
    width: usize,
    depth: usize,
    activation: Activation,
) -> ExperimentConfig {
    let mut cfg = base.clone();
    cfg.network.width = width;
    cfg.network.depth = depth;
    cfg.network.activation = activation;
    cfg.seed = derive_seed(base.seed, &[width as u64, depth as u64, activation as u64]);
    cfg
}

fn summarize(width: usize, depth: usize, activation: Activation, traj: TrajectoryRecord) -> CellResult {
    let first_epoch = traj.records.first().map(|r| r.epoch);
    let last_epoch = traj.records.last().map(|r| r.epoch);
    let init_cvs = traj
        .records
        .iter()
        .filter(|r| Some(r.epoch) == first_epoch)
        .map(|r| r.cv)
        .collect();
    let final_cvs = traj
        .records
        .iter()
        .filter(|r| Some(r.epoch) == last_epoch)
        .map(|r| r.cv)
        .collect();
    let final_losses = traj
        .records
        .iter()
        .filter(|r| Some(r.epoch) == last_epoch)
        .map(|r| (r.split, r.loss))
        .collect();
    CellResult {
        width,
        depth,
        activation,
        trajectory: Some(traj),
        error: None,
        init_cvs,
        final_cvs,
        final_losses,
    }
}

/// Run every cell of the grid. Cells are independent; failures are
/// recorded per cell and the scan continues. Cells may run concurrently;
/// aggregation order is the grid order regardless of completion order.
pub fn run_architecture_scan(grid: &ScanGrid, base: &ExperimentConfig) -> Result<ScanResult> {
    grid.validate()?;
    let cells: Vec<CellResult> = grid
        .cells()
        .into_par_iter()
        .map(|(w, d, a)| {
            let cfg = cell_config(base, w, d, a);
            match run_training_experiment(&cfg) {
                Ok(traj) => summarize(w, d, a, traj),
                Err(e) => CellResult {
                    width: w,
                    depth: d,
                    activation: a,
                    trajectory: None,
                    error: Some(e.to_string()),
                    init_cvs: Vec::new(),
                    final_cvs: Vec::new(),
                    final_losses: Vec::new(),
                },
            }
        })
        .collect();
    Ok(ScanResult {
        grid: grid.clone(),
        base: base.clone(),
        cells,
    })
}
