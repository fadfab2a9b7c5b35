//! Atomic file output and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use cherry_core::pipeline::Escalation;

/// Writes `contents` to a temp file beside `path`, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `# precision_bits=P tuned_depth=T` followed by the CSV.
pub fn stamped_csv(csv: &str, precision_bits: usize, tuned_depth: usize) -> String {
    format!("# precision_bits={precision_bits} tuned_depth={tuned_depth}\n{csv}")
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

#[derive(Debug, Default, Serialize)]
pub struct PrecisionAudit {
    pub requested_bits: usize,
    pub final_bits: usize,
    pub cap_bits: usize,
    pub escalations: Vec<Escalation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortest_arc: Option<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct CheckCounts {
    pub pass: usize,
    pub fail: usize,
    pub hard_fail: usize,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub precision: PrecisionAudit,
    pub wall_time_s: f64,
    pub checks: CheckCounts,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

/// Collects the outputs of one command and writes them with a manifest.
pub struct Recorder {
    start: Instant,
    config: Value,
    pub precision: PrecisionAudit,
    pub checks: CheckCounts,
    outputs: Vec<String>,
}

impl Recorder {
    pub fn new(config: Value) -> Self {
        Recorder {
            start: Instant::now(),
            config,
            precision: PrecisionAudit::default(),
            checks: CheckCounts::default(),
            outputs: Vec::new(),
        }
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> std::io::Result<()> {
        write_atomic(path, contents)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    pub fn finish(self, manifest_path: &Path, exit_code: i32) -> std::io::Result<()> {
        let m = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config: self.config,
            precision: self.precision,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            checks: self.checks,
            outputs: self.outputs,
            exit_code,
        };
        write_atomic(manifest_path, &to_json(&m))
    }
}
