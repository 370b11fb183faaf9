//! Flat key=value configuration shared by every subcommand.
//!
//! Values come from an optional config file (one `key = value` per line,
//! `#` starts a comment) and from repeatable `--set key=value` flags, which
//! win over the file. Dedicated flags (`--threads`) win over both. Each
//! subcommand validates the merged keys against its own whitelist and
//! rejects unknown keys by name, so typos fail fast with exit code 2.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use tgspectra::symbols::parse_complex;
use tgspectra::Complex64;

/// A CLI-level failure with the exit code mandated by the contract:
/// 2 for configuration errors, 3 for numerical/runtime failures.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl From<tgspectra::symbols::SymbolError> for CliError {
    fn from(e: tgspectra::symbols::SymbolError) -> Self {
        use tgspectra::symbols::SymbolError::*;
        match e {
            Config(_) | InvalidParameter(_) => CliError::Config(e.to_string()),
            SingularSample { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<tgspectra::spaces::SpaceError> for CliError {
    fn from(e: tgspectra::spaces::SpaceError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<tgspectra::weights::WeightError> for CliError {
    fn from(e: tgspectra::weights::WeightError) -> Self {
        use tgspectra::weights::WeightError::*;
        match e {
            NonPositiveSample { .. } | NonFiniteLog { .. } => CliError::Numerical(e.to_string()),
            GridTooCoarse { .. } | InvalidGrid(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<tgspectra::spectra::SpectraError> for CliError {
    fn from(e: tgspectra::spectra::SpectraError) -> Self {
        use tgspectra::spectra::SpectraError::*;
        match e {
            OverflowNearOrigin { .. } => CliError::Numerical(e.to_string()),
            Domain(_) => CliError::Config(e.to_string()),
            Weight(w) => w.into(),
            Symbol(s) => s.into(),
            Io(io) => CliError::Numerical(io.to_string()),
        }
    }
}

impl From<tgspectra::operators::OperatorError> for CliError {
    fn from(e: tgspectra::operators::OperatorError) -> Self {
        use tgspectra::operators::OperatorError::*;
        match e {
            ZeroLambda | UnsupportedSpace { .. } => CliError::Config(e.to_string()),
            Overflow(_) | NonConvergence { .. } => CliError::Numerical(e.to_string()),
            Io(io) => CliError::Numerical(io.to_string()),
        }
    }
}

impl From<tgspectra::bmoa::BmoaError> for CliError {
    fn from(e: tgspectra::bmoa::BmoaError) -> Self {
        use tgspectra::bmoa::BmoaError::*;
        match e {
            NoBracket { .. } | NonFinite { .. } => CliError::Numerical(e.to_string()),
            Weight(w) => w.into(),
            Symbol(s) => s.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("I/O: {e}"))
    }
}

/// Merged configuration: entries in application order, later wins.
#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: Vec<(String, String)>,
}

impl Config {
    /// Loads the config file (if any) and applies `--set` overrides.
    pub fn load(file: Option<&Path>, sets: &[String]) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config file {}: {e}", path.display()))
            })?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Config(format!(
                        "{}:{}: expected key=value, got '{line}'",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                cfg.set(k.trim(), v.trim());
            }
        }
        for s in sets {
            let (k, v) = s.split_once('=').ok_or_else(|| {
                CliError::Config(format!("--set expects key=value, got '{s}'"))
            })?;
            cfg.set(k.trim(), v.trim());
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Last-set value for a key.
    pub fn get(&self, key: &str) -> Option<String> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.clone())
    }

    /// The effective (deduplicated, sorted) entries for provenance.
    pub fn effective(&self) -> Vec<(String, String)> {
        let mut map = BTreeMap::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), v.clone());
        }
        map.into_iter().collect()
    }

    /// Rejects any key outside the command's whitelist, naming the first
    /// offender.
    pub fn check_keys(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        for (k, _) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown configuration key '{k}' for {command} (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn require(&self, key: &str) -> Result<String, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| {
                CliError::Config(format!("key '{key}' must be a real number, got '{v}'"))
            }),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.trim().parse().map_err(|_| {
                CliError::Config(format!("key '{key}' must be a non-negative integer, got '{v}'"))
            }),
        }
    }

    pub fn get_complex(&self, key: &str) -> Result<Option<Complex64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => parse_complex(&v)
                .map(Some)
                .ok_or_else(|| CliError::Config(format!("key '{key}' must be re[:im], got '{v}'"))),
        }
    }

    pub fn require_complex(&self, key: &str) -> Result<Complex64, CliError> {
        self.get_complex(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn later_entries_win_and_effective_dedupes() {
        let mut cfg = Config::default();
        cfg.set("p", "2");
        cfg.set("p", "4");
        assert_eq!(cfg.get("p").as_deref(), Some("4"));
        assert_eq!(cfg.effective(), vec![("p".to_string(), "4".to_string())]);
    }

    #[test]
    fn set_flags_override_file() {
        let dir = std::env::temp_dir().join(format!("tgspectra-cfg-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        fs::write(&path, "# comment\np = 2\nnx = 40\n").unwrap();
        let cfg = Config::load(Some(&path), &["p=4".to_string()]).unwrap();
        assert_eq!(cfg.get("p").as_deref(), Some("4"));
        assert_eq!(cfg.get("nx").as_deref(), Some("40"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_key_is_named() {
        let mut cfg = Config::default();
        cfg.set("nx", "10");
        cfg.set("bogus", "1");
        let err = cfg.check_keys("spectrum-map", &["nx"]).unwrap_err();
        assert!(matches!(err, CliError::Config(ref m) if m.contains("'bogus'")));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn malformed_lines_and_sets_error() {
        let dir = std::env::temp_dir().join(format!("tgspectra-cfg2-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.conf");
        fs::write(&path, "just-a-token\n").unwrap();
        assert!(Config::load(Some(&path), &[]).is_err());
        assert!(Config::load(None, &["nokey".to_string()]).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }
}
