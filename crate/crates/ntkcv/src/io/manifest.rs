//! `manifest.json` written next to every run's outputs: tool version,
//! config hash, the invoking command line, timestamps and the list of
//! files produced. Timestamps are informational and are the only
//! nondeterministic fields, so byte comparisons of run outputs should
//! skip the manifest or null them out first.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub config_hash: String,
    pub command_line: Vec<String>,
    pub started_unix_secs: u64,
    pub finished_unix_secs: u64,
    pub outputs: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(config_hash: &str, command_line: Vec<String>) -> Self {
        let now = unix_now();
        RunManifest {
            manifest_version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.to_string(),
            command_line,
            started_unix_secs: now,
            finished_unix_secs: now,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn finish(&mut self) {
        self.finished_unix_secs = unix_now();
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::write(dir.join("manifest.json"), self.to_json())?;
        Ok(())
    }
}
