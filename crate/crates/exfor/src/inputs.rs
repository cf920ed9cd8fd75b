//! Input discovery and reading.

use std::io;
use std::path::{Path, PathBuf};

use exfor_core::normalize::{UnitTable, UnitTableError};

/// The default unit rule file, identical to [`UnitTable::default`].
pub const DEFAULT_UNITS: &str = include_str!("../data/units.txt");

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Walk { path: PathBuf, source: walkdir::Error },
    #[error("{path}: {source}")]
    Units { path: PathBuf, source: UnitTableError },
}

/// Expand files and directories into a list of files. Directories are
/// walked recursively in name order, skipping hidden entries; explicit
/// files are kept in the order given.
pub fn discover(paths: &[PathBuf]) -> Result<Vec<PathBuf>, InputError> {
    let mut files = Vec::new();
    for path in paths {
        let meta = std::fs::metadata(path).map_err(|source| InputError::Io { path: path.clone(), source })?;
        if !meta.is_dir() {
            files.push(path.clone());
            continue;
        }
        let walker = walkdir::WalkDir::new(path)
            .sort_by_file_name()
            .into_iter()
            .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
        for entry in walker {
            let entry = entry.map_err(|source| InputError::Walk { path: path.clone(), source })?;
            if entry.file_type().is_file() {
                files.push(entry.into_path());
            }
        }
    }
    Ok(files)
}

/// Read a file as text. Bytes that are not UTF-8 are replaced rather than
/// rejected; old archive files are often Latin-1.
pub fn read_text(path: &Path) -> Result<String, InputError> {
    let bytes = std::fs::read(path).map_err(|source| InputError::Io { path: path.into(), source })?;
    Ok(match String::from_utf8(bytes) {
        Ok(text) => text,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    })
}

/// Load a unit rule file, or the built-in rules when `path` is `None`.
pub fn load_units(path: Option<&Path>) -> Result<UnitTable, InputError> {
    let Some(path) = path else {
        return Ok(UnitTable::default());
    };
    let text = read_text(path)?;
    UnitTable::parse(&text).map_err(|source| InputError::Units { path: path.into(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_rule_file_matches_builtin_table() {
        assert_eq!(UnitTable::parse(DEFAULT_UNITS).unwrap(), UnitTable::default());
    }

    #[test]
    fn directories_are_walked_in_name_order() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("sub")).unwrap();
        for name in ["b.x4", "a.x4", "sub/c.x4", ".hidden"] {
            std::fs::write(dir.path().join(name), "").unwrap();
        }
        let files = discover(&[dir.path().to_path_buf()]).unwrap();
        let names: Vec<_> = files.iter().map(|p| p.strip_prefix(dir.path()).unwrap().to_path_buf()).collect();
        assert_eq!(names, [PathBuf::from("a.x4"), PathBuf::from("b.x4"), PathBuf::from("sub/c.x4")]);
    }

    #[test]
    fn missing_input() {
        assert!(matches!(discover(&[PathBuf::from("/nonexistent/x4")]), Err(InputError::Io { .. })));
    }

    #[test]
    fn latin1_bytes_are_replaced() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a");
        std::fs::write(&path, b"ENTRY\xe9").unwrap();
        assert_eq!(read_text(&path).unwrap(), "ENTRY\u{fffd}");
    }
}
