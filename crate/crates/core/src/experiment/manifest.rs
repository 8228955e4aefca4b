//! Run manifests: the full resolved configuration, input hashes, output
//! inventory and per-criterion outcomes of every experiment run.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Fully resolved configuration (defaults applied, flags folded in).
    pub config: serde_json::Value,
    /// SHA-256 of each input file consumed by the run.
    pub input_hashes: Vec<(String, String)>,
    /// Output files written under the run directory.
    pub outputs: Vec<String>,
    pub criteria: Vec<CriterionResult>,
    pub wall_seconds: f64,
}

/// Collects outputs and criteria during a run and finalizes the manifest.
pub struct RunRecorder {
    out_dir: PathBuf,
    manifest: RunManifest,
    started: Instant,
}

impl RunRecorder {
    pub fn new(command: &str, out_dir: &Path, config: serde_json::Value) -> Result<Self> {
        std::fs::create_dir_all(out_dir)?;
        Ok(Self {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest {
                command: command.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config,
                input_hashes: Vec::new(),
                outputs: Vec::new(),
                criteria: Vec::new(),
                wall_seconds: 0.0,
            },
            started: Instant::now(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn hash_input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        self.manifest
            .input_hashes
            .push((path.display().to_string(), hex_string(&digest)));
        Ok(())
    }

    /// Writes an output file under the run directory and records it.
    pub fn write_output(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, contents)?;
        self.manifest.outputs.push(name.into());
        Ok(path)
    }

    pub fn criterion(&mut self, name: &str, passed: bool, details: String) {
        self.manifest.criteria.push(CriterionResult {
            name: name.into(),
            passed,
            details,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.manifest.criteria.iter().all(|c| c.passed)
    }

    pub fn criteria(&self) -> &[CriterionResult] {
        &self.manifest.criteria
    }

    /// Writes `manifest.json` and returns the finished manifest.
    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.wall_seconds = self.started.elapsed().as_secs_f64();
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&self.manifest)?)?;
        Ok(self.manifest)
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// 17-significant-digit CSV number formatting shared by all writers.
pub fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_and_writes() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = RunRecorder::new("demo", dir.path(), serde_json::json!({"seed": 7})).unwrap();
        rec.write_output("table.csv", "a,b\r\n1,2\r\n").unwrap();
        rec.criterion("sanity", true, "ok".into());
        let manifest = rec.finish().unwrap();
        assert_eq!(manifest.outputs, vec!["table.csv".to_string()]);
        assert!(manifest.criteria[0].passed);
        assert!(dir.path().join("manifest.json").exists());
        // every referenced output exists
        for out in &manifest.outputs {
            assert!(dir.path().join(out).exists());
        }
    }

    #[test]
    fn csv_number_has_17_significant_digits() {
        let s = csv_num(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
    }
}
