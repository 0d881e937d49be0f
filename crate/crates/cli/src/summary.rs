//! The run summary JSON every command writes next to its outputs.

use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Self-contained record of one invocation: rerunning the command with the
/// echoed config and seed reproduces the same outputs. Field order is the
/// serialization order, so summaries are byte-stable.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub command: String,
    pub version: String,
    pub rng_seed: u64,
    pub config: serde_json::Value,
    pub label_mapping: Option<BTreeMap<String, u32>>,
    pub selected_ids: Option<Vec<String>>,
    pub metrics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunSummary {
    pub fn new(command: &str, rng_seed: u64, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng_seed,
            config,
            label_mapping: None,
            selected_ids: None,
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
            timings_ms: None,
        }
    }

    /// Folds an ingestion mapping (class name per dense id) into the summary.
    pub fn set_label_mapping(&mut self, mapping: &Option<Vec<String>>) {
        self.label_mapping = mapping.as_ref().map(|names| {
            names
                .iter()
                .enumerate()
                .map(|(id, name)| (name.clone(), id as u32))
                .collect()
        });
    }

    pub fn add_timing(&mut self, enabled: bool, phase: &str, elapsed: std::time::Duration) {
        if enabled {
            self.timings_ms
                .get_or_insert_with(BTreeMap::new)
                .insert(phase.to_string(), elapsed.as_secs_f64() * 1e3);
        }
    }
}

/// Writes `summary.json` under `dir` and returns its path.
pub fn write_summary(dir: &Path, summary: &mut RunSummary) -> std::io::Result<PathBuf> {
    summary.outputs.push("summary.json".to_string());
    let mut bytes = serde_json::to_vec_pretty(summary)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    bytes.push(b'\n');
    let path = dir.join("summary.json");
    std::fs::write(&path, bytes)?;
    Ok(path)
}
