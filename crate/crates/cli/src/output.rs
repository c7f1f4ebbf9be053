//! Deterministic CSV and manifest writing.
//!
//! Reals are printed with 17 significant digits (`{:.16e}`), `.` decimal
//! point, `,` separators, UTF-8. Bodies are byte-identical for identical
//! `(config, seed)` regardless of thread count; manifests may differ in wall
//! time only.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// 17-significant-digit scientific form used for every real column.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

pub struct OutDir {
    pub root: PathBuf,
}

impl OutDir {
    pub fn create(path: &Path) -> Result<OutDir, CliError> {
        fs::create_dir_all(path)?;
        Ok(OutDir {
            root: path.to_path_buf(),
        })
    }

    pub fn write(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        fs::write(&path, body)?;
        Ok(path)
    }
}

/// FNV-1a over the canonical config text; hex-printed in the manifest.
pub fn fnv1a(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// The run manifest written next to every result set.
pub fn manifest_json(
    config_text: &str,
    master_seed: u64,
    threads: Option<usize>,
    wall_time_ms: u128,
) -> String {
    serde_json::json!({
        "tool": "levelcross",
        "version": env!("CARGO_PKG_VERSION"),
        "config_hash": format!("{:016x}", fnv1a(config_text)),
        "master_seed": master_seed,
        "threads": threads,
        "wall_time_ms": wall_time_ms,
    })
    .to_string()
}

/// Builds a CSV body from a fixed header and row fields.
pub fn csv_body(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
