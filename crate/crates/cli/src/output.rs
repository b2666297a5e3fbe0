//! Artifact directory handling and atomic writes.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::HarnessError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// `FOURNS_OUT` if set and nonempty, else the configured directory.
pub fn resolve_dir(configured: &Path, env: Option<&str>) -> PathBuf {
    match env {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => configured.to_path_buf(),
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn tmp_path(target: &Path) -> PathBuf {
    let mut name = target.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    target.with_file_name(name)
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(target: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), HarnessError> {
    let tmp = tmp_path(target);
    let file = File::create(&tmp).map_err(io_err(&tmp))?;
    let mut w = BufWriter::new(file);
    fill(&mut w).map_err(io_err(&tmp))?;
    let file = w.into_inner().map_err(|e| e.into_error()).map_err(io_err(&tmp))?;
    file.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, target).map_err(io_err(target))
}

pub fn write_text(target: &Path, text: &str) -> Result<(), HarnessError> {
    write_atomic(target, |w| w.write_all(text.as_bytes()))
}

/// Line stream into a temp file that is renamed into place by [`finish`],
/// whether or not the producer succeeded.
///
/// [`finish`]: StreamingFile::finish
pub struct StreamingFile {
    target: PathBuf,
    tmp: PathBuf,
    w: BufWriter<File>,
}

impl StreamingFile {
    pub fn create(target: &Path) -> Result<Self, HarnessError> {
        let tmp = tmp_path(target);
        let file = File::create(&tmp).map_err(io_err(&tmp))?;
        Ok(Self {
            target: target.to_path_buf(),
            tmp,
            w: BufWriter::new(file),
        })
    }

    pub fn line(&mut self, line: &str) -> std::io::Result<()> {
        self.w.write_all(line.as_bytes())?;
        self.w.write_all(b"\n")?;
        self.w.flush()
    }

    pub fn finish(self) -> Result<(), HarnessError> {
        let file = self.w.into_inner().map_err(|e| e.into_error()).map_err(io_err(&self.tmp))?;
        file.sync_all().map_err(io_err(&self.tmp))?;
        fs::rename(&self.tmp, &self.target).map_err(io_err(&self.target))
    }
}
