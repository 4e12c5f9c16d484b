//! Output files and the checksum manifest that lists them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Context};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    State,
    DensityMatrix,
    WignerGrid,
    Marginal,
    Samples,
    LikelihoodTrace,
    Report,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub kind: Kind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<FileEntry>,
    pub config_echo: serde_json::Value,
    pub versions: BTreeMap<String, String>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_NAME);
        let text = fs::read_to_string(&path).map_err(|source| CliError::Read { path, source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn checksums(&self) -> BTreeMap<&str, &str> {
        self.files.iter().map(|f| (f.path.as_str(), f.sha256.as_str())).collect()
    }
}

/// Collects files written under one output directory.
pub struct Artifacts {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl Artifacts {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|source| CliError::Write {
            path: root.to_path_buf(),
            source,
        })?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Renders a file into memory, then writes and records it.
    pub fn emit<F>(&mut self, name: &str, kind: Kind, render: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> orthosim_core::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf).context(format!("rendering {name}"))?;
        let path = self.root.join(name);
        fs::write(&path, &buf).map_err(|source| CliError::Write { path, source })?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(&buf)),
            kind,
        });
        Ok(())
    }

    pub fn emit_json<T: Serialize>(&mut self, name: &str, kind: Kind, value: &T) -> Result<(), CliError> {
        self.emit(name, kind, |buf| {
            serde_json::to_writer_pretty(&mut *buf, value)?;
            buf.push(b'\n');
            Ok(())
        })
    }

    pub fn finish(mut self, config: &ExperimentConfig) -> Result<Manifest, CliError> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = Manifest {
            files: self.files,
            config_echo: serde_json::to_value(config).expect("config serializes"),
            versions: versions(),
        };
        let path = self.root.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|source| CliError::Write { path, source })?;
        Ok(manifest)
    }
}

fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("orthosim-core".to_string(), orthosim_core::VERSION.to_string()),
        ("orthosim-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        (
            "convention".to_string(),
            orthosim_core::phase_space::CONVENTION.to_string(),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    #[test]
    fn manifest_lists_every_file_with_its_digest() {
        let dir = tempfile::tempdir().unwrap();
        let mut art = Artifacts::create(dir.path()).unwrap();
        art.emit("b.txt", Kind::Report, |buf| {
            buf.extend_from_slice(b"abc");
            Ok(())
        })
        .unwrap();
        art.emit_json("a.json", Kind::Report, &[1, 2]).unwrap();
        let m = art.finish(&ExperimentConfig::new(Experiment::Verify)).unwrap();
        assert_eq!(m.files.len(), 2);
        assert_eq!(m.files[0].path, "a.json");
        assert_eq!(
            m.files[1].sha256,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(Manifest::read(dir.path()).unwrap(), m);
        assert!(m.config_echo.get("output_dir").is_none());
    }
}
