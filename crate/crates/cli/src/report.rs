//! Report output: every command emits one JSON document on stdout, wrapped
//! in an envelope that carries a SHA-256 hash of the body so downstream
//! consumers can verify reruns reproduced the same result byte for byte.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use qic_core::region::RatePoint;
use qic_core::Result;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Envelope<T> {
    content_hash: String,
    body: T,
}

/// Renders `body` with its content hash. The hash is taken over the
/// compact (non-pretty) serialization of the body alone.
pub fn render<T: Serialize>(body: &T) -> Result<String> {
    let canonical = serde_json::to_string(body)?;
    let digest = Sha256::digest(canonical.as_bytes());
    let hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(serde_json::to_string_pretty(&Envelope { content_hash: hash, body })?)
}

/// Prints the report to stdout and, when an output directory is given,
/// also writes it to `<name>-report.json` there.
pub fn emit<T: Serialize>(body: &T, out: Option<&Path>, name: &str) -> Result<()> {
    let text = render(body)?;
    println!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(format!("{name}-report.json")), format!("{text}\n"))?;
    }
    Ok(())
}

fn significant(v: f64) -> String {
    format!("{v:.11e}")
}

/// Writes region vertices as `R1,R2` rows, counterclockwise, with twelve
/// significant digits.
pub fn write_vertex_csv(path: &Path, vertices: &[RatePoint]) -> Result<()> {
    let mut text = String::from("R1,R2\n");
    for v in vertices {
        text.push_str(&format!("{},{}\n", significant(v.r1), significant(v.r2)));
    }
    fs::write(path, text)?;
    Ok(())
}
