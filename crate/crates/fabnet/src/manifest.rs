//! JSON manifest written beside every output, holding what is needed to
//! rerun it.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::run::Job;
use crate::usage;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// CSV table, or the CIR file for `nlos gen`.
    pub main: PathBuf,
    /// Event trace or `.iq` dump.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
}

impl Outputs {
    pub fn new(main: impl Into<PathBuf>) -> Self {
        Self { main: main.into(), dump: None }
    }

    /// Same file names under `dir`.
    pub fn moved_to(&self, dir: &Path) -> Self {
        let mv = |p: &Path| dir.join(p.file_name().unwrap_or(p.as_os_str()));
        Self {
            main: mv(&self.main),
            dump: self.dump.as_deref().map(mv),
        }
    }

    pub fn all(&self) -> Vec<&Path> {
        let mut v = vec![self.main.as_path()];
        v.extend(self.dump.as_deref());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub job: Job,
    pub seed: u64,
    pub version: String,
    pub outputs: Outputs,
}

impl RunManifest {
    pub fn new(job: Job, outputs: Outputs) -> Self {
        Self {
            seed: job.seed(),
            job,
            version: VERSION.to_string(),
            outputs,
        }
    }

    /// `out/mac.csv` -> `out/mac.manifest.json`.
    pub fn path_for(main: &Path) -> PathBuf {
        main.with_extension("manifest.json")
    }

    pub fn write(&self) -> Result<PathBuf> {
        let path = Self::path_for(&self.outputs.main);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }
}
