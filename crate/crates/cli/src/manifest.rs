use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputRecord {
    pub path: PathBuf,
    pub sha256: String,
}

/// Written next to the first output of every run as `<output>.manifest.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub inputs: Vec<InputRecord>,
    pub version: String,
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub wall_time_s: f64,
    pub outputs: Vec<PathBuf>,
}

pub struct Recorder {
    started: Instant,
    inputs: Vec<InputRecord>,
    outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Recorder {
    pub fn new() -> Self {
        Self {
            started: Instant::now(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
        }
    }

    /// Reads an input file and records its hash.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.push(InputRecord {
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Writes the manifest beside the first output; runs that only print to
    /// stdout have nothing to sit next to and write none.
    pub fn finish(self) -> Result<Option<PathBuf>> {
        let Some(first) = self.outputs.first() else {
            return Ok(None);
        };
        let mut name = first.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let manifest = RunManifest {
            command_line: std::env::args().collect(),
            inputs: self.inputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            tolerance: cvxlab::tol::eps_geom(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        let json = serde_json::to_string_pretty(&manifest)?;
        std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(Some(path))
    }
}
