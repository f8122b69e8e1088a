//! File formats, configuration and report persistence. The layouts are
//! specified byte by byte in `docs/formats.md`.

mod config;
mod losses;
mod manifest;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use config::{AuditConfig, AutoKeyword, DeltaPolicy};
pub use losses::{header_kind, parse_loss_csv, read_loss_file, serialize_losses, write_loss_file, LossFileKind};
pub use manifest::{Manifest, ManifestEntry};
pub use report::{
    from_json, to_json_pretty, AuditReport, ClampDiagnostics, MechanismDocument, Provenance, AUDIT_SCHEMA,
    MECHANISM_SCHEMA,
};

use crate::error::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "EPSILON_STAR_OUT_DIR";

/// `$EPSILON_STAR_OUT_DIR` when set and non-empty, else the current directory.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes to a temporary file in the target directory and renames it over
/// `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    // temporary files are created owner-only; outputs are ordinary files
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))
            .map_err(|e| Error::io(path, e))?;
    }
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
