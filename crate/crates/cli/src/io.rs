use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ulam_core::cache::{self, CacheError, MAGIC};
use ulam_core::UlamSequence;

use crate::{Failure, CACHE_DIR_VAR};

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_VAR).filter(|v| !v.is_empty()).map(PathBuf::from)
}

/// Relative output names go under $ULAM_CACHE_DIR when it is set.
pub fn output_path(name: &Path) -> PathBuf {
    match cache_dir() {
        Some(dir) if name.is_relative() => dir.join(name),
        _ => name.to_path_buf(),
    }
}

/// A relative input that does not exist is looked up in $ULAM_CACHE_DIR.
pub fn input_path(name: &Path) -> PathBuf {
    if name.is_relative() && !name.exists() {
        if let Some(dir) = cache_dir() {
            return dir.join(name);
        }
    }
    name.to_path_buf()
}

fn resource(path: &Path, err: impl std::fmt::Display) -> Failure {
    Failure::Resource(format!("{}: {err}", path.display()))
}

/// Reads a binary cache, or a text export when the magic bytes are absent.
pub fn load(name: &Path) -> Result<UlamSequence, Failure> {
    let path = input_path(name);
    let bytes = fs::read(&path).map_err(|e| resource(&path, e))?;
    let parsed = if bytes.starts_with(MAGIC) || !looks_like_text(&bytes) {
        cache::from_bytes(&bytes)
    } else {
        cache::read_text(bytes.as_slice())
    };
    parsed.map_err(|e: CacheError| resource(&path, e))
}

fn looks_like_text(bytes: &[u8]) -> bool {
    bytes
        .iter()
        .take(64)
        .all(|b| b.is_ascii_graphic() || b.is_ascii_whitespace())
}

pub fn create_parent(path: &Path) -> Result<(), Failure> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| resource(dir, e)),
        _ => Ok(()),
    }
}

/// Buffered writer on a file, or on stdout when `path` is `None`.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            create_parent(p)?;
            let f = File::create(p).map_err(|e| resource(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

/// [`sink`] for an optional `--out` flag, resolved with [`output_path`].
pub fn report_sink(flag: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    sink(flag.map(output_path).as_deref())
}

pub fn io_failure(err: impl std::fmt::Display) -> Failure {
    Failure::Resource(format!("write failed: {err}"))
}

pub fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value).map_err(io_failure)?;
    writeln!(out).map_err(io_failure)
}
