//! File formats and command-line driver for `csrbf-core`.
//!
//! * scattered data and query points are CSV with a header row
//!   (`x,h`, `x,y,h` or `x,y,z,h`),
//! * fitted models are JSON ([`model_json`]),
//! * grid evaluations are CSV and diagnostics reports are JSON.
//!
//! All files are written atomically (temporary file in the target directory,
//! then rename).

pub mod cli;
pub mod csv_io;
mod error;
pub mod model_json;
pub mod report;

pub use error::{Error, Result};

use std::io::Write;
use std::path::Path;

/// Writes `contents` to `path` through a temporary file and a rename.
pub(crate) fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
