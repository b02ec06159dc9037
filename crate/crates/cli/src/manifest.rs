//! Run manifest: content hashes of every stage's inputs and outputs, used
//! both as a provenance record and as the staleness check for resume.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use decaygraph_core::error::{DecayError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileStamp {
    /// Relative to the run directory when possible, absolute otherwise.
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    /// The stage's effective parameters, embedded verbatim so a manifest
    /// documents the run and parameter changes invalidate the stage.
    pub params: serde_json::Value,
    pub inputs: Vec<FileStamp>,
    pub outputs: Vec<FileStamp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    /// The single seed all stage randomness derives from.
    pub seed: u64,
    pub stages: Vec<StageRecord>,
}

impl Manifest {
    pub fn new(seed: u64) -> Manifest {
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            stages: Vec::new(),
        }
    }

    /// Load a previous run's manifest; absent or unreadable files just mean
    /// there is nothing to resume from.
    pub fn load(dir: &Path) -> Option<Manifest> {
        let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(format!("{MANIFEST_FILE}.partial"));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&tmp, text)?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// Insert or replace a stage record, keeping execution order.
    pub fn upsert(&mut self, record: StageRecord) {
        match self.stages.iter_mut().find(|s| s.name == record.name) {
            Some(slot) => *slot = record,
            None => self.stages.push(record),
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| {
        DecayError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    use std::fmt::Write as _;
    let mut hex = String::with_capacity(64);
    for byte in hasher.finalize() {
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

/// Stamp a file, storing its path relative to `base` when it lives inside.
pub fn stamp(base: &Path, path: &Path) -> Result<FileStamp> {
    let rel: PathBuf = path.strip_prefix(base).map(Path::to_path_buf).unwrap_or_else(|_| path.to_path_buf());
    Ok(FileStamp { path: rel.to_string_lossy().into_owned(), sha256: sha256_file(path)? })
}

/// True when a recorded stage still matches: same parameters, same input
/// hashes, and every recorded output sitting on disk unchanged.
pub fn up_to_date(
    previous: Option<&Manifest>,
    base: &Path,
    name: &str,
    params: &serde_json::Value,
    inputs: &[FileStamp],
) -> bool {
    let Some(stage) = previous.and_then(|m| m.stage(name)) else {
        return false;
    };
    if &stage.params != params || stage.inputs != inputs {
        return false;
    }
    stage.outputs.iter().all(|out| {
        let path = base.join(&out.path);
        matches!(sha256_file(&path), Ok(h) if h == out.sha256)
    })
}
