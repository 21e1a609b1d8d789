//! Scan result JSON emission. The document is schema versioned and
//! serialized with stable key order so repeated runs produce identical
//! bytes for identical inputs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::{CellResult, MeasurementRecord, ScanResult};
use crate::nn::Activation;
use crate::spectral::{CollectiveVariables, Split};

pub const SCAN_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanAxes {
    pub widths: Vec<usize>,
    pub depths: Vec<usize>,
    pub activations: Vec<Activation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanCellDoc {
    pub width: usize,
    pub depth: usize,
    pub activation: Activation,
    pub error: Option<String>,
    pub init_cvs: Vec<CollectiveVariables>,
    pub final_cvs: Vec<CollectiveVariables>,
    pub final_losses: Vec<(Split, f64)>,
    pub records: Vec<MeasurementRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanDoc {
    pub schema_version: u32,
    pub config_hash: String,
    pub axes: ScanAxes,
    pub cells: Vec<ScanCellDoc>,
}

fn cell_doc(cell: &CellResult) -> ScanCellDoc {
    ScanCellDoc {
        width: cell.width,
        depth: cell.depth,
        activation: cell.activation,
        error: cell.error.clone(),
        init_cvs: cell.init_cvs.clone(),
        final_cvs: cell.final_cvs.clone(),
        final_losses: cell.final_losses.clone(),
        records: cell
            .trajectory
            .as_ref()
            .map(|t| t.records.clone())
            .unwrap_or_default(),
    }
}

pub fn scan_to_doc(scan: &ScanResult, config_hash: &str) -> ScanDoc {
    ScanDoc {
        schema_version: SCAN_SCHEMA_VERSION,
        config_hash: config_hash.to_string(),
        axes: ScanAxes {
            widths: scan.grid.widths.clone(),
            depths: scan.grid.depths.clone(),
            activations: scan.grid.activations.clone(),
        },
        cells: scan.cells.iter().map(cell_doc).collect(),
    }
}

pub fn scan_to_json(scan: &ScanResult, config_hash: &str) -> String {
    let doc = scan_to_doc(scan, config_hash);
    let mut text = serde_json::to_string_pretty(&doc).expect("scan doc serializes");
    text.push('\n');
    text
}

pub fn emit_scan_json(scan: &ScanResult, config_hash: &str, path: &Path) -> Result<()> {
    std::fs::write(path, scan_to_json(scan, config_hash))?;
    Ok(())
}
