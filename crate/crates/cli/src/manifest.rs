//! Run manifests: one TOML file per command tying every output file to the
//! exact configuration, seed, and pass/fail summary that produced it. The
//! manifest is the only place wall time appears; data files stay
//! reproducible byte for byte.

use std::fmt::Write as _;
use std::path::Path;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Default)]
pub struct Manifest {
    pub command: String,
    pub master_seed: u64,
    pub config_digest: String,
    pub config_echo: String,
    pub discarded_small_jump_variance: Option<f64>,
    pub claims: Vec<(String, bool)>,
    pub outputs: Vec<(String, String)>,
    /// Task-specific scalar records (e.g. step statistics).
    pub extras: Vec<(String, String)>,
    pub wall_time_seconds: f64,
}

fn toml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl Manifest {
    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut s = String::new();
        let _ = writeln!(s, "artifact_version = {}", toml_escape(ARTIFACT_VERSION));
        let _ = writeln!(s, "command = {}", toml_escape(&self.command));
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        let _ = writeln!(s, "config_digest = {}", toml_escape(&self.config_digest));
        if let Some(v) = self.discarded_small_jump_variance {
            let _ = writeln!(s, "discarded_small_jump_variance = {v}");
        }
        for (key, value) in &self.extras {
            let _ = writeln!(s, "{key} = {value}");
        }
        let _ = writeln!(s, "wall_time_seconds = {}", self.wall_time_seconds);
        let _ = writeln!(s, "config_echo = {}", toml_escape(&self.config_echo));
        let _ = writeln!(s, "\n[claims]");
        for (claim, pass) in &self.claims {
            let _ = writeln!(s, "{} = {}", toml_escape(claim), pass);
        }
        let _ = writeln!(s, "\n[outputs]");
        for (file, digest) in &self.outputs {
            let _ = writeln!(s, "{} = {}", toml_escape(file), toml_escape(digest));
        }
        std::fs::write(path, s.as_bytes())?;
        Ok(())
    }
}
