//! Optional on-disk cache for the two tables, keyed by (s_max, step).
//!
//! Files are JSON; the serializer emits shortest round-trip decimal for
//! every f64, so a cache hit reproduces a fresh build bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dickman::{build_rho_table, RhoTable};
use crate::error::{Error, Result};
use crate::sievefn::{build_sievefn_table, SieveFnTable};

fn key_path(dir: &Path, kind: &str, s_max: f64, step: f64) -> PathBuf {
    // Bit-exact key so nearby floats never alias.
    dir.join(format!(
        "{kind}-{:016x}-{:016x}.json",
        s_max.to_bits(),
        step.to_bits()
    ))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Load the rho table for (s_max, step) from `dir`, or build it (and
/// populate the cache) on a miss. `dir = None` always builds.
pub fn load_or_build_rho(dir: Option<&Path>, s_max: f64, step: f64) -> Result<RhoTable> {
    let Some(dir) = dir else {
        return build_rho_table(s_max, step);
    };
    let fresh_key = build_probe(s_max, step)?;
    let path = key_path(dir, "rho", fresh_key.0, fresh_key.1);
    if let Ok(bytes) = fs::read(&path) {
        match serde_json::from_slice::<RhoTable>(&bytes) {
            Ok(t) if t.s_max() == fresh_key.0 && t.step() == fresh_key.1 => return Ok(t),
            Ok(_) | Err(_) => {} // stale or corrupt; fall through to rebuild
        }
    }
    let table = build_rho_table(s_max, step)?;
    let bytes = serde_json::to_vec(&table).map_err(|e| Error::CacheFormat(e.to_string()))?;
    write_atomic(&path, &bytes)?;
    Ok(table)
}

/// Same contract for the paired sieve-function tables.
pub fn load_or_build_sievefn(dir: Option<&Path>, s_max: f64, step: f64) -> Result<SieveFnTable> {
    let Some(dir) = dir else {
        return build_sievefn_table(s_max, step);
    };
    let fresh_key = build_probe(s_max, step)?;
    let path = key_path(dir, "sievefn", fresh_key.0, fresh_key.1);
    if let Ok(bytes) = fs::read(&path) {
        match serde_json::from_slice::<SieveFnTable>(&bytes) {
            Ok(t) if t.s_max() == fresh_key.0 && t.step() == fresh_key.1 => return Ok(t),
            Ok(_) | Err(_) => {}
        }
    }
    let table = build_sievefn_table(s_max, step)?;
    let bytes = serde_json::to_vec(&table).map_err(|e| Error::CacheFormat(e.to_string()))?;
    write_atomic(&path, &bytes)?;
    Ok(table)
}

/// Normalized (s_max, step) as the builders will store them, so the cache
/// key matches the built table exactly.
fn build_probe(s_max: f64, step: f64) -> Result<(f64, f64)> {
    if !(step > 0.0 && step <= crate::dickman::MAX_STEP) {
        return Err(crate::error::Error::Domain(format!(
            "step must be in (0, 1/64], got {step}"
        )));
    }
    let n = (1.0 / step).ceil();
    Ok((s_max.ceil(), 1.0 / n))
}
