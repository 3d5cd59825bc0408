//! CSV emission. Every data file carries a comment line with the effective
//! config digest and a header row; timestamps never enter data files, so
//! reruns are byte-identical.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(out.len() * 2);
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

/// Digest of the effective configuration: raw file bytes plus the command
/// line overrides that change outputs.
pub fn effective_config_digest(raw: &str, seed: u64, paths: Option<usize>, full_state: bool) -> String {
    let overrides = format!("\n#override seed={seed} paths={paths:?} full_state={full_state}");
    sha256_hex(format!("{raw}{overrides}").as_bytes())
}

/// Write one CSV file; returns the digest of the written bytes.
pub fn write_csv(
    path: &Path,
    config_digest: &str,
    header: &str,
    rows: &[String],
) -> anyhow::Result<String> {
    let mut body = String::new();
    body.push_str(&format!("# config_digest={config_digest}\n"));
    body.push_str(header);
    body.push('\n');
    for row in rows {
        body.push_str(row);
        body.push('\n');
    }
    fs::write(path, body.as_bytes())?;
    Ok(sha256_hex(body.as_bytes()))
}

/// Compact float formatting: shortest round-trip representation.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}
