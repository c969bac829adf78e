//! Atomic file writes and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use dualpol_core::protocol::MemoryMetrics;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let name = path.file_name().ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", tmp.display()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunStatus {
    /// "completed" or "failed".
    pub state: String,
    pub samples_written: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_at_tau_us: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

/// The resolved configuration plus tool version and run outcome. Its `config` table is a
/// complete [`RunConfig`], so a manifest can be fed back with `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub status: RunStatus,
    pub config: RunConfig,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("manifest: {}", e.message().trim())))
    }
}

/// Reads either a plain config or a manifest, telling them apart by the `version` key.
pub fn load_config_or_manifest(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let is_manifest = table.contains_key("version") && table.get("config").is_some_and(toml::Value::is_table);
    if is_manifest {
        Ok(Manifest::from_toml(&text)?.config)
    } else {
        RunConfig::from_toml(&text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsFile {
    pub preset: String,
    pub input_energy_v2s_per_m2: f64,
    pub leakage: f64,
    pub retrieval_efficiency_a: f64,
    pub retrieval_efficiency_b: f64,
    pub transmitted_total: f64,
    pub spinwave_plateau_drift: f64,
    pub storage_peak_ratio: f64,
    /// Retrieved energy a/b; written as a string because it may be inf or nan.
    pub splitting_ratio: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retrieval_peak_us_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retrieval_peak_us_b: Option<f64>,
    pub storage_window_us: [f64; 2],
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl MetricsFile {
    pub fn new(preset: &str, m: &MemoryMetrics, accepted: usize, rejected: usize) -> Self {
        Self {
            preset: preset.into(),
            input_energy_v2s_per_m2: m.input_energy,
            leakage: m.leakage,
            retrieval_efficiency_a: m.retrieval_efficiency[0],
            retrieval_efficiency_b: m.retrieval_efficiency[1],
            transmitted_total: m.transmitted_total,
            spinwave_plateau_drift: m.spinwave_plateau_drift,
            storage_peak_ratio: m.storage_peak_ratio,
            splitting_ratio: format!("{:e}", m.splitting_ratio),
            retrieval_peak_us_a: m.retrieval_peak_time[0].map(|t| t * 1e6),
            retrieval_peak_us_b: m.retrieval_peak_time[1].map(|t| t * 1e6),
            storage_window_us: [m.storage_window.0 * 1e6, m.storage_window.1 * 1e6],
            accepted_steps: accepted,
            rejected_steps: rejected,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metrics serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        let names: Vec<_> = fs::read_dir(p.parent().unwrap()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn manifest_round_trips() {
        let m = Manifest {
            version: VERSION.into(),
            command: "simulate".into(),
            status: RunStatus { state: "failed".into(), samples_written: 3, failed_at_tau_us: Some(1.5), message: Some("x".into()) },
            config: RunConfig::default().resolved_copy().unwrap(),
        };
        assert_eq!(Manifest::from_toml(&m.to_toml()).unwrap(), m);
    }

    #[test]
    fn loader_accepts_both_forms() {
        let dir = tempfile::tempdir().unwrap();
        let c = RunConfig::default();
        let p = dir.path().join("c.toml");
        fs::write(&p, c.to_toml()).unwrap();
        assert_eq!(load_config_or_manifest(&p).unwrap(), c);
        let m = Manifest {
            version: VERSION.into(),
            command: "simulate".into(),
            status: RunStatus { state: "completed".into(), samples_written: 0, failed_at_tau_us: None, message: None },
            config: c.clone(),
        };
        fs::write(&p, m.to_toml()).unwrap();
        assert_eq!(load_config_or_manifest(&p).unwrap(), c);
    }
}
