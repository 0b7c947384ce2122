//! Output envelope shared by every subcommand: a schema-versioned JSON
//! document with a metadata block (timestamp, tool version, invocation,
//! RNG provenance) wrapping the analysis payload. Results are printed to
//! stdout and mirrored into the output directory.

use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use driftline::{Error, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Provenance of any randomness used to produce the payload.
#[derive(Clone, Debug, Serialize)]
pub struct RngInfo {
    pub algorithm: &'static str,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    /// UTC generation time; the only field allowed to differ between
    /// otherwise identical runs.
    pub timestamp: String,
    pub tool_version: &'static str,
    /// The invocation that produced this document.
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<RngInfo>,
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub payload: T,
}

pub fn metadata(command: &str, rng: Option<RngInfo>) -> Metadata {
    Metadata {
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        tool_version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        rng,
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `text` to `dir/name`, creating the directory if needed.
pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

/// Serializes the envelope, prints it to stdout, and mirrors it to
/// `dir/name`. Key order is deterministic (struct order for typed payloads,
/// sorted for ad-hoc maps), so identical payloads yield byte-identical
/// documents outside the metadata block.
pub fn emit_json<T: Serialize>(
    dir: &Path,
    name: &str,
    command: &str,
    rng: Option<RngInfo>,
    payload: &T,
) -> Result<PathBuf> {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        metadata: metadata(command, rng),
        payload,
    };
    let text = serde_json::to_string_pretty(&envelope)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    // A closed stdout (e.g. piping into `head`) must not kill the run; the
    // mirrored file below is the durable artifact.
    use std::io::Write as _;
    let _ = writeln!(std::io::stdout(), "{text}");
    write_text(dir, name, &(text + "\n"))
}
