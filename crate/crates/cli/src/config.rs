//! Flat key=value config files with [sections], plus the canonical
//! serialization that gets hashed into every output artifact.
//!
//! The format is deliberately dumb: one `key = value` per line, `[section]`
//! headers, `#`/`;` comments. Sections and keys are stored sorted so the
//! canonical form (and therefore the config hash) does not depend on input
//! order.

use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

type Section = BTreeMap<String, String>;

/// Parsed config plus the directory it was loaded from (relative paths in
/// values resolve against it).
#[derive(Debug, Clone, Default)]
pub struct Config {
    sections: BTreeMap<String, Section>,
    pub base_dir: PathBuf,
}

impl Config {
    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError(format!("line {}: unterminated section header", lineno + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError(format!("line {}: empty section name", lineno + 1)));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", lineno + 1)));
            }
            if current.is_empty() {
                return Err(ConfigError(format!(
                    "line {}: key `{key}` appears before any [section]",
                    lineno + 1
                )));
            }
            let section = sections.get_mut(&current).expect("section exists");
            if section.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError(format!(
                    "line {}: duplicate key `{key}` in [{current}]",
                    lineno + 1
                )));
            }
        }
        Ok(Self { sections, base_dir })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
        Self::parse(&text, base)
    }

    /// Insert or overwrite one key (CLI flag overrides land here, so they
    /// participate in the hash like any config line).
    pub fn set(&mut self, section: &str, key: &str, value: &str) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(|v| v.as_str())
    }

    pub fn get_str(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.raw(section, key)
            .ok_or_else(|| ConfigError(format!("missing key `{key}` in [{section}]")))
    }

    pub fn opt_str(&self, section: &str, key: &str) -> Option<&str> {
        self.raw(section, key)
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<f64, ConfigError> {
        parse_f64(section, key, self.get_str(section, key)?)
    }

    pub fn opt_f64(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(section, key).map(|v| parse_f64(section, key, v)).transpose()
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<usize, ConfigError> {
        let v = self.get_str(section, key)?;
        v.parse::<usize>()
            .map_err(|_| ConfigError(format!("[{section}] {key} = `{v}` is not a non-negative integer")))
    }

    pub fn opt_usize(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError(format!("[{section}] {key} = `{v}` is not a non-negative integer"))),
        }
    }

    pub fn opt_bool(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some("true") | Some("yes") | Some("1") => Ok(Some(true)),
            Some("false") | Some("no") | Some("0") => Ok(Some(false)),
            Some(v) => Err(ConfigError(format!("[{section}] {key} = `{v}` is not a boolean"))),
        }
    }

    /// Comma-separated list of unsigned integers.
    pub fn get_usize_list(&self, section: &str, key: &str) -> Result<Vec<usize>, ConfigError> {
        let v = self.get_str(section, key)?;
        v.split(',')
            .map(|tok| {
                tok.trim().parse::<usize>().map_err(|_| {
                    ConfigError(format!("[{section}] {key}: `{}` is not a non-negative integer", tok.trim()))
                })
            })
            .collect()
    }

    /// A path value, resolved against the config file's directory.
    pub fn get_path(&self, section: &str, key: &str) -> Result<PathBuf, ConfigError> {
        let v = self.get_str(section, key)?;
        let p = Path::new(v);
        Ok(if p.is_absolute() { p.to_path_buf() } else { self.base_dir.join(p) })
    }

    /// Reject keys nobody reads: a typo in a config should fail loudly, not
    /// silently fall back to a default.
    pub fn ensure_known(&self, allowed: &[(&str, &[&str])]) -> Result<(), ConfigError> {
        for (section, keys) in &self.sections {
            let Some((_, allowed_keys)) = allowed.iter().find(|(s, _)| s == section) else {
                return Err(ConfigError(format!("unknown section [{section}]")));
            };
            for key in keys.keys() {
                if !allowed_keys.contains(&key.as_str()) {
                    return Err(ConfigError(format!("unknown key `{key}` in [{section}]")));
                }
            }
        }
        Ok(())
    }

    /// Canonical text: sorted sections, sorted keys, exactly one space
    /// around `=`. This is what gets hashed and echoed into sidecars.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (name, section) in &self.sections {
            out.push('[');
            out.push_str(name);
            out.push_str("]\n");
            for (k, v) in section {
                out.push_str(k);
                out.push_str(" = ");
                out.push_str(v);
                out.push('\n');
            }
        }
        out
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
        }
        hex
    }

    /// Sorted (section, key, value) triples for the sidecar echo.
    pub fn entries(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        for (name, section) in &self.sections {
            for (k, v) in section {
                out.push((name.clone(), k.clone(), v.clone()));
            }
        }
        out
    }
}

fn parse_f64(section: &str, key: &str, v: &str) -> Result<f64, ConfigError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(ConfigError(format!("[{section}] {key} = `{v}` is not a finite number"))),
    }
}

/// Whole-line and trailing comments; a `#` or `;` only opens a comment at
/// the start of the line or after whitespace, so values may contain them
/// mid-token.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if (b == b'#' || b == b';') && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}
