//! File output helpers: float formatting, atomic writes, run manifests.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    let mut w = BufWriter::new(tmp);
    fill(&mut w)?;
    let tmp = w
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Files written by one run, with their SHA-256 digests.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    dir: PathBuf,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            entries: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `name` atomically inside the manifest directory and records it.
    pub fn write<F>(&mut self, name: &str, fill: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut dyn Write) -> Result<()>,
    {
        let path = self.dir.join(name);
        write_atomic(&path, fill)?;
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        self.entries.retain(|(n, _)| n != name);
        self.entries.push((name.to_string(), sha256_hex(&bytes)));
        Ok(path)
    }

    /// `(file name, digest)` sorted by name.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut e = self.entries.clone();
        e.sort();
        e
    }

    pub fn render(&self) -> String {
        self.entries()
            .iter()
            .map(|(name, digest)| format!("{digest}  {name}\n"))
            .collect()
    }

    /// Writes `manifest.txt`; the manifest does not list itself.
    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join("manifest.txt");
        let text = self.render();
        write_atomic(&path, |w| {
            w.write_all(text.as_bytes())
                .map_err(|e| Error::io("manifest.txt", e))
        })?;
        Ok(path)
    }
}
