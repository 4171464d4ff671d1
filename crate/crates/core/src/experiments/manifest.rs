use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{ExperimentKind, ResolvedConfig};
use crate::error::{KdnlsError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// Pass/fail decided by the run; no single scalar to compare.
    Flag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub comparison: Comparison,
    /// Measured value; `None` when not finite.
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Assertion {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= threshold,
            comparison: Comparison::AtMost,
            value: finite(value),
            threshold: finite(threshold),
            detail: format!("{value:.6e} <= {threshold:.6e}"),
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= threshold,
            comparison: Comparison::AtLeast,
            value: finite(value),
            threshold: finite(threshold),
            detail: format!("{value:.6e} >= {threshold:.6e}"),
        }
    }

    pub fn holds(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            comparison: Comparison::Flag,
            value: None,
            threshold: None,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the manifest directory.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: ExperimentKind,
    pub config: ResolvedConfig,
    pub code_version: String,
    /// Grid, scheme and derived run parameters.
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub wall_time_s: f64,
    pub assertions: Vec<Assertion>,
    /// Calibration constants the assertions depend on.
    pub calibration: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub files: Vec<FileRecord>,
    pub passed: bool,
}

impl RunManifest {
    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn failed(&self) -> Vec<&Assertion> {
        self.assertions.iter().filter(|a| !a.passed).collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| KdnlsError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| KdnlsError::Serialization(e.to_string()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Owns one run directory; every data file goes through it so that the
/// manifest lists each file with its content hash.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl RunWriter {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| KdnlsError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| KdnlsError::io(&path, e))?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<RunManifest> {
        manifest.files = self.files;
        manifest.passed = manifest.assertions.iter().all(|a| a.passed);
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| KdnlsError::Serialization(e.to_string()))?;
        let path = self.dir.join(MANIFEST_FILE);
        fs::write(&path, text).map_err(|e| KdnlsError::io(&path, e))?;
        Ok(manifest)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub missing: Vec<String>,
    pub hash_mismatches: Vec<String>,
    pub failed_assertions: Vec<String>,
    /// The stored overall flag disagrees with the assertions.
    pub inconsistent_flag: bool,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.missing.is_empty()
            && self.hash_mismatches.is_empty()
            && self.failed_assertions.is_empty()
            && !self.inconsistent_flag
    }
}

/// Re-hashes every listed file and re-evaluates the assertion flags.
pub fn check_manifest(path: &Path) -> Result<CheckReport> {
    let manifest = RunManifest::load(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut report = CheckReport::default();
    for file in &manifest.files {
        match fs::read(dir.join(&file.path)) {
            Ok(bytes) if sha256_hex(&bytes) == file.sha256 => {}
            Ok(_) => report.hash_mismatches.push(file.path.clone()),
            Err(_) => report.missing.push(file.path.clone()),
        }
    }
    for a in &manifest.assertions {
        let recomputed = match (a.comparison, a.value, a.threshold) {
            (Comparison::AtMost, Some(v), Some(t)) => v <= t,
            (Comparison::AtLeast, Some(v), Some(t)) => v >= t,
            (Comparison::Flag, _, _) => a.passed,
            _ => false,
        };
        if !(a.passed && recomputed) {
            report.failed_assertions.push(a.name.clone());
        }
    }
    report.inconsistent_flag = manifest.passed != manifest.assertions.iter().all(|a| a.passed);
    Ok(report)
}
