//! Output files. Each one opens with the SHA-256 of the canonical JSON of
//! the configuration that produced it.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Hex SHA-256 of `config` serialized as JSON.
pub fn config_hash<S: Serialize + ?Sized>(config: &S) -> Result<String> {
    // Round-trip through `Value` so object keys come out sorted.
    let value = serde_json::to_value(config)?;
    let bytes = serde_json::to_vec(&value)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

pub fn csv_header_line(hash: &str) -> String {
    format!("# config-sha256={hash}")
}

/// Writes the hash line followed by `body`.
pub fn write_csv_with_hash(out: &mut impl Write, hash: &str, body: &str) -> Result<()> {
    writeln!(out, "{}", csv_header_line(hash))?;
    out.write_all(body.as_bytes())?;
    Ok(())
}

/// Writes `{"config_sha256": ..., "data": ...}` with the hash on the first line.
pub fn write_json_with_hash<S: Serialize + ?Sized>(out: &mut impl Write, hash: &str, data: &S) -> Result<()> {
    writeln!(out, "{{\"config_sha256\": \"{hash}\",")?;
    write!(out, "\"data\": ")?;
    serde_json::to_writer_pretty(&mut *out, data)?;
    writeln!(out, "}}")?;
    Ok(())
}

/// Strips a leading hash line, if present, returning `(hash, rest)`.
pub fn split_csv_header(text: &str) -> (Option<&str>, &str) {
    match text.strip_prefix("# config-sha256=") {
        Some(rest) => {
            let (line, body) = rest.split_once('\n').unwrap_or((rest, ""));
            (Some(line.trim()), body)
        }
        None => (None, text),
    }
}
