use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::{Mode, SweepConfig};
use crate::output::sha256_file;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointNote {
    pub point: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputHash {
    pub file: String,
    pub sha256: String,
}

/// Written last; its presence marks a completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub mode: Mode,
    pub config: SweepConfig,
    pub started: String,
    pub finished: String,
    pub warnings: Vec<PointNote>,
    pub outputs: Vec<OutputHash>,
}

pub fn manifest_path(out: &Path, mode: Mode) -> PathBuf {
    out.join(format!("manifest-{mode}.json"))
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Every listed output exists in `dir` with the recorded hash.
    pub fn outputs_intact(&self, dir: &Path) -> bool {
        self.outputs
            .iter()
            .all(|o| sha256_file(&dir.join(&o.file)).is_ok_and(|h| h == o.sha256))
    }

    /// All completed-run manifests in `dir`, sorted by file name.
    pub fn load_all(dir: &Path) -> Result<Vec<Self>> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .with_context(|| format!("listing {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("manifest-") && n.ends_with(".json"))
            })
            .collect();
        paths.sort();
        paths.iter().map(|p| Self::load(p)).collect()
    }
}
