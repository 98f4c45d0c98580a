//! Atomic file output and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Run record written next to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_seed: Option<u64>,
    pub tool_version: &'static str,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            args: std::env::args().skip(1).collect(),
            base_seed: None,
            tool_version: TOOL_VERSION,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.base_seed = Some(seed);
        self
    }

    pub fn input(mut self, path: &Path) -> CliResult<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.inputs.push(digest(path, &bytes));
        Ok(self)
    }

    /// `# key=value` lines for formats that carry their own header.
    pub fn header_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![
            ("command".to_owned(), self.command.clone()),
            ("args".to_owned(), self.args.join(" ")),
            ("tool_version".to_owned(), self.tool_version.to_owned()),
        ];
        if let Some(seed) = self.base_seed {
            pairs.push(("base_seed".to_owned(), seed.to_string()));
        }
        for d in &self.inputs {
            pairs.push(("input".to_owned(), format!("{} sha256:{}", d.path, d.sha256)));
        }
        pairs
    }
}

pub fn digest(path: &Path, bytes: &[u8]) -> FileDigest {
    FileDigest {
        path: path.display().to_string(),
        sha256: format!("{:x}", Sha256::digest(bytes)),
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Stages every output, then commits them together with one sidecar
/// manifest per file. Nothing touches the filesystem until `commit`.
pub struct Outputs {
    manifest: RunManifest,
    files: Vec<(PathBuf, Vec<u8>, bool)>,
}

impl Outputs {
    pub fn new(manifest: RunManifest) -> Self {
        Self {
            manifest,
            files: Vec::new(),
        }
    }

    /// Output with a sidecar `<path>.manifest.json`.
    pub fn add(&mut self, path: &Path, bytes: Vec<u8>) {
        self.files.push((path.to_path_buf(), bytes, true));
    }

    /// Output whose own header already embeds the manifest.
    pub fn add_self_describing(&mut self, path: &Path, bytes: Vec<u8>) {
        self.files.push((path.to_path_buf(), bytes, false));
    }

    pub fn commit(mut self) -> CliResult<()> {
        self.manifest.outputs = self.files.iter().map(|(p, b, _)| digest(p, b)).collect();
        let mut sidecar = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        sidecar.push('\n');
        for (path, bytes, with_sidecar) in &self.files {
            write_atomic(path, bytes)?;
            if *with_sidecar {
                write_atomic(&manifest_path(path), sidecar.as_bytes())?;
            }
            log::info!("wrote {}", path.display());
        }
        Ok(())
    }
}

pub fn write_stdout(bytes: &[u8]) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io("<stdout>", e))
}
