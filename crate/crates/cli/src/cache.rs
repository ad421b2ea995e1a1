//! On-disk calibration cache under `$RANKLQ_CACHE_DIR`.

use std::path::PathBuf;

use ranklq::calib::{load_calibration, persist_calibration, CalibrationRecord};
use ranklq::CoefficientKind;

pub const ENV_VAR: &str = "RANKLQ_CACHE_DIR";

pub fn dir() -> Option<PathBuf> {
    std::env::var_os(ENV_VAR)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// File name keyed by (kind, n, B, seed).
pub fn file_name(kind: CoefficientKind, n: usize, b: usize, seed: u64) -> String {
    format!("{}-n{n}-B{b}-seed{seed}.json", kind.short_name())
}

pub fn load(kind: CoefficientKind, n: usize, b: usize, seed: u64) -> Option<CalibrationRecord> {
    let path = dir()?.join(file_name(kind, n, b, seed));
    if !path.exists() {
        return None;
    }
    match load_calibration(&path) {
        Ok(rec) if rec.check_matches(kind, n).is_ok() => Some(rec),
        // unreadable entries are recomputed and overwritten
        _ => {
            eprintln!("warning: ignoring unusable cache entry {}", path.display());
            None
        }
    }
}

pub fn store(rec: &CalibrationRecord, b: usize, seed: u64) {
    let Some(dir) = dir() else { return };
    let path = dir.join(file_name(rec.kind, rec.n, b, seed));
    let res = std::fs::create_dir_all(&dir)
        .map_err(ranklq::Error::from)
        .and_then(|_| persist_calibration(&path, rec));
    if let Err(e) = res {
        eprintln!("warning: could not write cache entry {}: {e}", path.display());
    }
}
