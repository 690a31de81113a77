//! File formats: event and trigger CSV, netpbm images, ASCII point clouds,
//! and the run configuration dialect. All writers go through a temp-file
//! rename so readers never observe a half-written file.

pub mod config;
pub mod events;
pub mod netpbm;
pub mod ply;

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Header { path: String, msg: String },
    #[error("{path}:{line}: rows must be sorted, this one precedes its predecessor")]
    Unsorted { path: String, line: usize },
}

impl FormatError {
    pub(crate) fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse { path: path.display().to_string(), line, msg: msg.into() }
    }

    pub(crate) fn header(path: &Path, msg: impl Into<String>) -> Self {
        FormatError::Header { path: path.display().to_string(), msg: msg.into() }
    }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`, creating
/// parent directories as needed.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), FormatError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_and_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("nested/out.txt");
        write_atomic(&target, b"first").unwrap();
        write_atomic(&target, b"second").unwrap();
        assert_eq!(fs::read(&target).unwrap(), b"second");
        let tmp = dir.path().join("nested/out.txt.tmp");
        assert!(!tmp.exists(), "temp file must be renamed away");
    }
}
