use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Result;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::output::{to_json, write_file};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the canonical model config.
    pub config_digest: Option<String>,
    pub seed: Option<u64>,
    pub params: Value,
    pub version: String,
    pub duration_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// First eight bytes of the digest, big-endian.
pub fn seed_from_digest(hex: &str) -> u64 {
    u64::from_str_radix(&hex[..16], 16).expect("hex digest")
}

/// Times a command and writes its manifest next to `out`, or to stderr.
pub struct ManifestWriter {
    command: String,
    start: Instant,
}

impl ManifestWriter {
    pub fn start(command: &str) -> Self {
        Self { command: command.into(), start: Instant::now() }
    }

    pub fn finish(self, digest: Option<String>, seed: Option<u64>, params: Value, out: Option<&Path>) -> Result<RunManifest> {
        let m = RunManifest {
            command: self.command,
            config_digest: digest,
            seed,
            params,
            version: env!("CARGO_PKG_VERSION").into(),
            duration_s: self.start.elapsed().as_secs_f64(),
        };
        let text = to_json(&m)?;
        match out {
            Some(p) => write_file(&manifest_path(p), &text)?,
            None => eprint!("{text}"),
        }
        Ok(m)
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_and_seed() {
        let h = sha256_hex(b"abc");
        assert_eq!(h, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(seed_from_digest(&h), 0xba7816bf8f01cfea);
        assert_eq!(manifest_path(Path::new("out/scan.csv")), PathBuf::from("out/scan.csv.manifest.json"));
    }
}
