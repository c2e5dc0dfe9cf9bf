use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn stage(path: &Path, bytes: &[u8]) -> Result<NamedTempFile, CliError> {
    let dir = parent_dir(path);
    fs::create_dir_all(&dir)?;
    let mut tmp = NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    Ok(tmp)
}

/// Write through a temporary file in the target directory and rename it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_all_atomic(&[(path.to_path_buf(), bytes.to_vec())])
}

/// Stage every file first; rename only once all of them are written. A
/// failure while staging leaves no target file behind.
pub fn write_all_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<(), CliError> {
    let staged = files
        .iter()
        .map(|(path, bytes)| stage(path, bytes).map(|tmp| (path, tmp)))
        .collect::<Result<Vec<_>, _>>()?;
    for (path, tmp) in staged {
        tmp.persist(path)
            .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    }
    Ok(())
}
