//! Run manifests: the single file that makes a run reproducible.
//!
//! A manifest pins the resolved configuration, the content hashes of every
//! input file, and the seed. Re-running a command from its manifest produces
//! byte-identical model checkpoints and history files (timing numbers aside).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::artifacts::{atomic_write, HashedInput, SCHEMA_VERSION};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// Resolved settings after flag/config-file/default precedence.
    pub config: serde_json::Value,
    pub inputs: Vec<HashedInput>,
    pub seed: u64,
    /// Files this run writes into its directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        inputs: Vec<HashedInput>,
        seed: u64,
        outputs: &[&str],
    ) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            inputs,
            seed,
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        }
    }
}

pub fn write_manifest(run_dir: &Path, manifest: &RunManifest) -> Result<()> {
    let json = serde_json::to_vec_pretty(manifest)?;
    atomic_write(&run_dir.join(MANIFEST_FILE), &json)
}

pub fn load_manifest(run_dir: &Path) -> Result<RunManifest> {
    let path = run_dir.join(MANIFEST_FILE);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Verify that every input file still hashes to its recorded digest.
pub fn verify_inputs(inputs: &[HashedInput]) -> Result<()> {
    for input in inputs {
        let path = PathBuf::from(&input.path);
        let found = crate::artifacts::sha256_file(&path)?;
        if found != input.sha256 {
            return Err(Error::HashMismatch {
                path,
                expected: input.sha256.clone(),
                found,
            });
        }
    }
    Ok(())
}

/// Create a fresh run directory under `root`: UTC-timestamped, append-only
/// (an existing directory gets a numeric suffix rather than reuse).
pub fn create_run_dir(root: &Path, command: &str) -> Result<PathBuf> {
    let stamp = {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .expect("clock before epoch");
        format!("{}", now.as_secs())
    };
    for attempt in 0..1000 {
        let name = if attempt == 0 {
            format!("{stamp}-{command}")
        } else {
            format!("{stamp}-{command}-{attempt}")
        };
        let dir = root.join(&name);
        match fs::create_dir_all(root).and_then(|_| fs::create_dir(&dir)) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(&dir, e)),
        }
    }
    Err(Error::InvalidArgument(
        "could not allocate a fresh run directory".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_round_trips_and_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let input_path = dir.path().join("input.txt");
        fs::write(&input_path, "hello").unwrap();
        let input = crate::artifacts::hashed_input("docs", &input_path).unwrap();
        let manifest = RunManifest::new(
            "train",
            serde_json::json!({"seed": 1}),
            vec![input],
            1,
            &["checkpoint.bin"],
        );
        write_manifest(dir.path(), &manifest).unwrap();
        let loaded = load_manifest(dir.path()).unwrap();
        assert_eq!(loaded.command, "train");
        verify_inputs(&loaded.inputs).unwrap();

        fs::write(&input_path, "tampered").unwrap();
        assert!(matches!(
            verify_inputs(&loaded.inputs),
            Err(Error::HashMismatch { .. })
        ));
    }

    #[test]
    fn run_dirs_never_collide() {
        let dir = tempfile::tempdir().unwrap();
        let a = create_run_dir(dir.path(), "train").unwrap();
        let b = create_run_dir(dir.path(), "train").unwrap();
        assert_ne!(a, b);
        assert!(a.exists() && b.exists());
    }
}
