//! Deterministic report plumbing: configuration hashing, provenance
//! headers, and byte-stable JSON emission shared by the command-line front
//! end.
//!
//! Reports never carry timestamps, hostnames, or thread counts: two runs
//! with the same configuration must produce byte-identical files regardless
//! of the parallelism degree, so everything written here is a pure function
//! of the resolved configuration and the computed payload.

use serde::Serialize;
use std::fs;
use std::io;
use std::path::Path;

/// Version of this library, stamped into every provenance header.
pub const CORE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut h = OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Hash of a resolved configuration: `key=value` lines joined in sorted key
/// order, hashed with FNV-1a and rendered as 16 hex digits. The `threads`
/// key is excluded so the hash — and therefore every report byte — cannot
/// depend on the parallelism degree.
pub fn config_hash(entries: &[(String, String)]) -> String {
    let mut pairs: Vec<&(String, String)> =
        entries.iter().filter(|(k, _)| k != "threads").collect();
    pairs.sort();
    let mut buf = String::new();
    for (k, v) in pairs {
        buf.push_str(k);
        buf.push('=');
        buf.push_str(v);
        buf.push('\n');
    }
    format!("{:016x}", fnv1a64(buf.as_bytes()))
}

/// Provenance header written into every JSON report: which tool and module
/// versions produced it, from which command, under which configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub command: String,
    pub config_hash: String,
}

impl Provenance {
    /// Builds a header for `tool`/`version` running `command` with the
    /// resolved configuration `config` (key/value pairs, `threads` ignored).
    pub fn new(tool: &str, version: &str, command: &str, config: &[(String, String)]) -> Self {
        Self {
            tool: tool.to_string(),
            version: version.to_string(),
            core_version: CORE_VERSION.to_string(),
            command: command.to_string(),
            config_hash: config_hash(config),
        }
    }
}

/// JSON envelope for a command: the provenance header first, then the
/// command's payload under `report`. Field order follows declaration order,
/// which is what the shipped schema files freeze.
#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub provenance: &'a Provenance,
    pub report: &'a T,
}

/// Renders a value as pretty JSON with a trailing newline — the exact bytes
/// [`write_json`] puts on disk. Payloads are plain structs (no maps with
/// non-string keys), for which serialization is infallible.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain report structs serialize");
    s.push('\n');
    s
}

/// Writes pretty JSON with a trailing newline, creating parent directories
/// as needed.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    ensure_parent(path)?;
    fs::write(path, render_json(value))
}

/// Writes raw text, creating parent directories as needed.
pub fn write_text(path: &Path, text: &str) -> io::Result<()> {
    ensure_parent(path)?;
    fs::write(path, text)
}

fn ensure_parent(path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn fnv1a64_matches_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn config_hash_is_order_invariant_and_ignores_threads() {
        let a = config_hash(&kv(&[("symbol", "cesaro-log"), ("p", "2")]));
        let b = config_hash(&kv(&[("p", "2"), ("symbol", "cesaro-log")]));
        let c = config_hash(&kv(&[("p", "2"), ("symbol", "cesaro-log"), ("threads", "4")]));
        assert_eq!(a, b);
        assert_eq!(a, c);
        let d = config_hash(&kv(&[("p", "4"), ("symbol", "cesaro-log")]));
        assert_ne!(a, d);
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn provenance_serializes_fields_in_declared_order() {
        let p = Provenance::new("tgspectra-cli", "0.1.0", "weights", &kv(&[("kind", "constant")]));
        let payload = serde_json::json!({ "verdict": "bounded" });
        let text = render_json(&Report {
            provenance: &p,
            report: &payload,
        });
        let order = ["provenance", "tool", "version", "core_version", "command", "config_hash", "report"];
        let mut last = 0;
        for key in order {
            let pos = text.find(&format!("\"{key}\"")).unwrap_or_else(|| panic!("missing {key}"));
            assert!(pos > last, "{key} out of order");
            last = pos;
        }
        assert!(text.ends_with('\n'));
        assert!(!text.contains("threads"));
    }

    #[test]
    fn write_json_creates_parents_and_round_trips() {
        let dir = std::env::temp_dir().join(format!("tgspectra-io-{}", std::process::id()));
        let path = dir.join("nested/report.json");
        write_json(&path, &serde_json::json!({ "x": 1 })).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "{\n  \"x\": 1\n}\n");
        fs::remove_dir_all(&dir).unwrap();
    }
}
