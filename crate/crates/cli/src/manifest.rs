//! Run manifests: the full effective configuration of a run, written next to
//! its artifacts so any run can be reproduced byte for byte.

use std::path::{Path, PathBuf};

use sbnednn_core::rng::SEED_DERIVATION;
use sbnednn_core::{Error, Result};
use serde_json::{json, Value};

/// Manifest file for an artifact: `<artifact>.manifest.json`.
pub fn manifest_path_for(artifact: &Path) -> PathBuf {
    let mut name = artifact
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".manifest.json");
    artifact.with_file_name(name)
}

/// Write a manifest: command name, base seed, the derivation scheme for
/// stage seeds, the effective flags, and the artifact paths.
pub fn write(path: &Path, command: &str, seed: u64, flags: Value, artifacts: Value) -> Result<()> {
    let manifest = json!({
        "format_version": 1,
        "command": command,
        "seed": seed,
        "seed_derivation": SEED_DERIVATION,
        "flags": flags,
        "artifacts": artifacts,
    });
    write_json(path, &manifest)
}

/// Serialize a JSON value with a trailing newline; keys come out sorted, so
/// the bytes are deterministic.
pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Schema(format!("json serialization failed: {e}")))?;
    std::fs::write(path, body + "\n").map_err(|e| Error::File {
        path: path.display().to_string(),
        source: e,
    })
}
