//! Table output (CSV or JSON), fixed-precision rounding and run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Output encoding for tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to 12 significant digits so that written numbers are stable.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn sig12_opt(x: Option<f64>) -> Option<f64> {
    x.map(sig12)
}

/// Encodes rows as CSV (header from the field names) or as a JSON array.
pub fn encode<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::io(e.to_string()))
        }
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(rows).map_err(|e| CliError::io(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
    }
}

/// Provenance record written beside every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub artifact_version: String,
    pub outputs: Vec<String>,
}

/// `run.csv` → `run.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

/// Writes the encoded table to `out` plus its manifest, or to stdout.
pub fn emit(
    bytes: &[u8],
    out: Option<&Path>,
    command: &str,
    parameters: BTreeMap<String, String>,
    seed: u64,
) -> Result<(), CliError> {
    let Some(out) = out else {
        std::io::stdout().write_all(bytes).map_err(|e| CliError::io(e.to_string()))?;
        return Ok(());
    };
    std::fs::write(out, bytes).map_err(|e| CliError::io(format!("{}: {e}", out.display())))?;
    let manifest = RunManifest {
        command: command.to_string(),
        parameters,
        seed,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs: vec![out.display().to_string()],
    };
    let path = manifest_path(out);
    let mut text = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::io(e.to_string()))?;
    text.push(b'\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(())
}
