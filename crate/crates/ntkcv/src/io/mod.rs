//! Configuration parsing and result serialization: TOML configs, CSV
//! trajectories, JSON scan documents, SVG line plots, run manifests.

pub mod config;
pub mod csv;
pub mod json;
pub mod manifest;
pub mod plot;

/// Full-precision decimal formatting (17 significant digits) so that
/// parsing the text reproduces the f64 bit pattern.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}
