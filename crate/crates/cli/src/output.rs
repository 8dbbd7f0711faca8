//! Output plumbing: experiment manifests, hashes, and JSON/CSV writers.

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

pub const SCHEMA_VERSION: u32 = 1;

/// Reproducibility metadata attached to every output. The statistical
/// payload lives under `result` and is byte-stable for a fixed manifest hash;
/// timestamps and runtime are manifest-only and excluded from that contract.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    pub artifact_version: &'static str,
    pub manifest_hash: String,
    pub threads: usize,
    pub outputs: Vec<String>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub runtime_seconds: f64,
}

pub struct ManifestBuilder {
    command: String,
    parameters: BTreeMap<String, String>,
    seed: u64,
    threads: usize,
    outputs: Vec<String>,
    started: SystemTime,
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: u64, threads: usize) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            seed,
            threads,
            outputs: Vec::new(),
            started: SystemTime::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn output(&mut self, path: &str) -> &mut Self {
        self.outputs.push(path.to_string());
        self
    }

    pub fn hash(&self) -> String {
        let mut canon = format!("{}\x1f{}\x1f{}", self.command, self.seed, version());
        for (k, v) in &self.parameters {
            canon.push_str(&format!("\x1f{k}={v}"));
        }
        format!("{:016x}", fnv1a64(canon.as_bytes()))
    }

    pub fn finish(self) -> ExperimentManifest {
        let hash = self.hash();
        let to_unix = |t: SystemTime| {
            t.duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        };
        let finished = SystemTime::now();
        let runtime = finished
            .duration_since(self.started)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        ExperimentManifest {
            command: self.command,
            parameters: self.parameters,
            seed: self.seed,
            artifact_version: version(),
            manifest_hash: hash,
            threads: self.threads,
            outputs: self.outputs,
            started_unix: to_unix(self.started),
            finished_unix: to_unix(finished),
            runtime_seconds: runtime,
        }
    }
}

pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Assemble the full JSON envelope: schema, manifest, deterministic result.
pub fn envelope<T: Serialize>(manifest: ExperimentManifest, result: &T) -> serde_json::Value {
    serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "manifest": manifest,
        "result": result,
    })
}

/// Write JSON to `--out` or stdout.
pub fn emit_json(value: &serde_json::Value, out: Option<&str>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")
        }
    }
}

/// Write CSV text (with an embedded manifest-hash comment line).
pub fn emit_csv(hash: &str, body: &str, out: Option<&str>) -> std::io::Result<()> {
    let text = format!("# manifest_hash={hash} schema_version={SCHEMA_VERSION}\n{body}");
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}
