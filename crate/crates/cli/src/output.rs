//! Deterministic serialization helpers: 17-significant-digit floats,
//! small hand-rolled JSON records, CSV assembly and the sidecar metadata
//! file (the only output that carries run info such as timestamps).

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64 as C64;

use crate::CliError;

/// Scientific notation with 17 significant digits: round-trip exact for
/// f64.
pub fn fnum(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fopt(v: Option<f64>) -> String {
    v.map(fnum).unwrap_or_else(|| "null".to_string())
}

pub fn jcomplex(c: C64) -> String {
    format!("{{\"re\": {}, \"im\": {}}}", fnum(c.re), fnum(c.im))
}

/// JSON object with the given key order preserved; values are already
/// rendered.
pub fn json_object(pairs: &[(&str, String)]) -> String {
    let mut s = String::from("{\n");
    for (i, (k, v)) in pairs.iter().enumerate() {
        s.push_str(&format!("  \"{k}\": {v}"));
        s.push_str(if i + 1 < pairs.len() { ",\n" } else { "\n" });
    }
    s.push_str("}\n");
    s
}

pub fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row);
        s.push('\n');
    }
    s
}

pub fn write_sidecar(
    prefix: &str,
    command: &str,
    config_path: &Path,
    seed: Option<u64>,
    resolved_config: &str,
) -> Result<(), CliError> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut meta = format!(
        "command = {command}\nconfig = {}\nunix_timestamp = {stamp}\n",
        config_path.display()
    );
    if let Some(seed) = seed {
        meta.push_str(&format!("seed = {seed}\n"));
    }
    meta.push_str("\n# resolved configuration (defaults filled in)\n");
    meta.push_str(resolved_config);
    std::fs::write(format!("{prefix}.meta.txt"), meta)?;
    Ok(())
}
