//! Atomic file and directory output.
//!
//! Everything is written to a temporary sibling first and renamed into place,
//! so an interrupted run never leaves a half-written artifact under the final name.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rfzt::{Error, Result};

fn parent_of(path: &Path) -> Result<PathBuf> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    Ok(parent)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let parent = parent_of(path)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&parent).map_err(|e| Error::io(&parent, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Fills a fresh directory via `fill`, then moves it to `dest`.
///
/// `dest` must not exist unless `replace` is set, in which case the old
/// directory is removed only after the new one is complete.
pub fn build_dir_atomic(dest: &Path, replace: bool, fill: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    if dest.exists() && !replace {
        let empty = dest.is_dir() && fs::read_dir(dest).map_err(|e| Error::io(dest, e))?.next().is_none();
        if !empty {
            return Err(Error::config("out", format!("{} already exists; pass --force to replace it", dest.display())));
        }
    }
    let parent = parent_of(dest)?;
    let staging = tempfile::Builder::new()
        .prefix(".rfzt-staging")
        .tempdir_in(&parent)
        .map_err(|e| Error::io(&parent, e))?;
    fill(staging.path())?;
    if dest.exists() {
        let old = if dest.is_dir() { fs::remove_dir_all(dest) } else { fs::remove_file(dest) };
        old.map_err(|e| Error::io(dest, e))?;
    }
    let staged = staging.keep();
    fs::rename(&staged, dest).map_err(|e| Error::io(dest, e))
}
