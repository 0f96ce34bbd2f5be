//! Small shared pieces for machine-readable output: exact rationals as
//! JSON, CSV assembly, and content hashing. Reports carry exact values
//! first; floating approximations ride along for human eyes only.

use aitlab_core::exact::{approx_f64, display, Rat};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// An exact rational with a lossy decimal companion.
pub fn rat_json(q: &Rat) -> Value {
    json!({ "exact": display(q), "approx": approx_f64(q) })
}

pub fn opt_rat_json(q: &Option<Rat>) -> Value {
    match q {
        Some(q) => rat_json(q),
        None => Value::Null,
    }
}

/// One CSV line; fields containing separators or quotes are quoted.
pub fn csv_row(fields: &[String]) -> String {
    let mut row = String::new();
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            row.push(',');
        }
        if f.contains([',', '"', '\n']) {
            row.push('"');
            row.push_str(&f.replace('"', "\"\""));
            row.push('"');
        } else {
            row.push_str(f);
        }
    }
    row.push('\n');
    row
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = csv_row(&header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    for row in rows {
        out.push_str(&csv_row(row));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Stable pretty JSON with a trailing newline, the only JSON shape written
/// to disk.
pub fn to_json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s.into_bytes()
}
