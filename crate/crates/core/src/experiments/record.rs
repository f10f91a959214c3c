use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

pub const RECORD_SCHEMA_VERSION: u32 = 1;
pub const RECORD_FILE: &str = "record.json";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// What a finished (or failed) run leaves behind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub config: serde_json::Value,
    /// `sha256("blob <len>\0" + inputs)` over the canonical config and any
    /// input dataset manifest.
    pub input_hash: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Reproducible metrics; wall time lives in the summary only.
    pub metrics: BTreeMap<String, f64>,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
}

impl ExperimentRecord {
    pub fn load(path: &Path) -> Result<Self> {
        let rec: ExperimentRecord = serde_json::from_str(&fs::read_to_string(path)?)?;
        if rec.schema_version != RECORD_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                what: "experiment record",
                found: rec.schema_version,
                expected: RECORD_SCHEMA_VERSION,
            });
        }
        Ok(rec)
    }
}

/// Git-style content hash, hex encoded.
pub fn content_hash(parts: &[&[u8]]) -> String {
    let len: usize = parts.iter().map(|p| p.len()).sum();
    let mut h = Sha256::new();
    h.update(format!("blob {len}\0").as_bytes());
    for p in parts {
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Builds `summary.json`: schema version, run identity, the metrics and the
/// wall time.
pub fn summary_json(
    header: &[(&str, serde_json::Value)],
    metrics: &BTreeMap<String, f64>,
    wall_seconds: f64,
) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("schema_version".into(), RECORD_SCHEMA_VERSION.into());
    for (k, v) in header {
        map.insert((*k).to_owned(), v.clone());
    }
    for (k, v) in metrics {
        map.insert(k.clone(), json_number(*v));
    }
    map.insert("wall_seconds".into(), json_number(wall_seconds));
    serde_json::Value::Object(map)
}

/// Non-finite values become `null`.
pub fn json_number(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// Everything needed to close a run.
pub struct RunEnd<'a> {
    pub config: &'a ExperimentConfig,
    pub out: &'a Path,
    /// Input bytes beyond the config, e.g. a dataset manifest.
    pub extra_inputs: &'a [u8],
    pub header: Vec<(&'static str, serde_json::Value)>,
    pub metrics: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
    pub status: RunStatus,
    pub error: Option<String>,
    pub wall_seconds: f64,
}

/// Writes `summary.json` and then, atomically, `record.json`.
pub fn finish_run(end: RunEnd<'_>) -> Result<ExperimentRecord> {
    let config_json = serde_json::to_value(end.config)?;
    let input_hash = content_hash(&[&serde_json::to_vec(&config_json)?, end.extra_inputs]);
    let mut header = end.header;
    header.push(("seed", end.config.seed.into()));
    header.push(("status", serde_json::to_value(end.status)?));
    header.push(("input_hash", input_hash.clone().into()));
    if let Some(n) = &end.config.name {
        header.push(("name", n.clone().into()));
    }
    if let Some(e) = &end.error {
        header.push(("error", e.clone().into()));
    }
    write_json(
        &end.out.join(SUMMARY_FILE),
        &summary_json(&header, &end.metrics, end.wall_seconds),
    )?;
    let mut artifacts = end.artifacts;
    artifacts.push(SUMMARY_FILE.into());
    let record = ExperimentRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        config: config_json,
        input_hash,
        status: end.status,
        error: end.error,
        metrics: end.metrics,
        artifacts,
    };
    write_json(&end.out.join(RECORD_FILE), &record)?;
    Ok(record)
}
