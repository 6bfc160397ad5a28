//! Run manifests and atomic file output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::sha256_hex;
use crate::error::Result;

pub const TOOL_NAME: &str = "bisar";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the output directory for outputs, as given for inputs.
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

impl FileRecord {
    pub fn of(path: &Path, recorded_as: PathBuf) -> Result<Self> {
        let data = std::fs::read(path)?;
        Ok(FileRecord {
            path: recorded_as,
            sha256: sha256_hex(&data),
            bytes: data.len() as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub config_hash: String,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub timings: Vec<StageTiming>,
}

/// Collects outputs and timings for one command, then writes the manifest.
pub struct RunRecorder {
    dir: PathBuf,
    manifest: RunManifest,
    stage_start: Option<(String, Instant)>,
}

impl RunRecorder {
    pub fn new(dir: &Path, command: &str, config_hash: String) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(RunRecorder {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool: TOOL_NAME.into(),
                tool_version: TOOL_VERSION.into(),
                command: command.into(),
                config_hash,
                inputs: Vec::new(),
                outputs: Vec::new(),
                timings: Vec::new(),
            },
            stage_start: None,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stage(&mut self, name: &str) {
        self.finish_stage();
        self.stage_start = Some((name.to_string(), Instant::now()));
    }

    fn finish_stage(&mut self) {
        if let Some((stage, t)) = self.stage_start.take() {
            self.manifest.timings.push(StageTiming {
                stage,
                seconds: t.elapsed().as_secs_f64(),
            });
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        let record = FileRecord::of(path, path.to_path_buf())?;
        self.manifest.inputs.push(record);
        Ok(())
    }

    /// Writes `name` inside the output directory and records it.
    pub fn output(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.manifest.outputs.push(FileRecord {
            path: PathBuf::from(name),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    /// Writes the manifest as `<command>[_<suffix>].manifest.json`.
    pub fn finish(mut self, suffix: Option<&str>) -> Result<(RunManifest, PathBuf)> {
        self.finish_stage();
        let stem = match suffix {
            Some(s) => format!("{}_{s}", self.manifest.command),
            None => self.manifest.command.clone(),
        };
        let path = self.dir.join(format!("{stem}.manifest.json"));
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        write_atomic(&path, text.as_bytes())?;
        Ok((self.manifest, path))
    }
}

/// Write to a temporary sibling and rename over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
