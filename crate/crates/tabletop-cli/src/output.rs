//! Atomic file outputs. Every file is written to a temp sibling and
//! renamed into place, and a multi-file set is renamed only after all
//! of its members are staged, so a failed command never leaves a
//! half-written result behind.

use std::io::Write;
use std::path::{Path, PathBuf};

use tabletop_core::{Error, Result};

pub fn write_set(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut staged = Vec::new();
    for (name, contents) in files {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(contents.as_bytes())?;
        tmp.flush()?;
        staged.push((tmp, dir.join(name)));
    }
    let mut written = Vec::new();
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
        written.push(target);
    }
    Ok(written)
}

pub fn write_one(dir: &Path, name: &str, contents: String) -> Result<PathBuf> {
    Ok(write_set(dir, &[(name, contents)])?.pop().expect("one file was written"))
}
