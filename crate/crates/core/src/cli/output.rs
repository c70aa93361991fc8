use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable whose value prefixes relative output paths.
pub const OUT_DIR_ENV: &str = "PEERGRAPH_OUT_DIR";

pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes `bytes` through a temporary file in the target directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Inputs, parameters and outputs of one run. Holds no timestamps, so a
/// repeated run yields the same manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub inputs: Vec<FileDigest>,
    pub params: Value,
    pub outputs: Vec<FileDigest>,
}

/// Collects what a subcommand reads and writes.
pub struct Run {
    command: Vec<String>,
    inputs: Vec<FileDigest>,
    params: Value,
    outputs: Vec<FileDigest>,
}

impl Run {
    pub fn new(command: Vec<String>) -> Self {
        Run {
            command,
            inputs: Vec::new(),
            params: Value::Null,
            outputs: Vec::new(),
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    pub fn read_string(&mut self, path: &Path) -> Result<String> {
        String::from_utf8(self.read(path)?).with_context(|| format!("{} is not UTF-8 text", path.display()))
    }

    pub fn params(&mut self, params: impl Serialize) -> Result<()> {
        self.params = serde_json::to_value(params)?;
        Ok(())
    }

    /// Renders into memory, then writes atomically to the resolved path.
    pub fn write(&mut self, path: &Path, render: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>) -> Result<PathBuf> {
        let path = resolve_out(path);
        let mut buf = Vec::new();
        render(&mut buf).with_context(|| format!("cannot render {}", path.display()))?;
        write_atomic(&path, &buf)?;
        self.outputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&buf),
        });
        Ok(path)
    }

    /// Writes to `path`, or to stdout when absent (no manifest entry).
    pub fn emit(&mut self, path: Option<&Path>, render: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>) -> Result<()> {
        match path {
            Some(p) => self.write(p, render).map(|_| ()),
            None => {
                let mut buf = Vec::new();
                render(&mut buf)?;
                std::io::stdout().write_all(&buf).context("cannot write to stdout")
            }
        }
    }

    /// `<first output>.manifest.json`; nothing when the run wrote no file.
    pub fn finish(self) -> Result<()> {
        let Some(first) = self.outputs.first() else {
            return Ok(());
        };
        let path = PathBuf::from(format!("{}.manifest.json", first.path));
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            inputs: self.inputs,
            params: self.params,
            outputs: self.outputs,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes)
    }
}
