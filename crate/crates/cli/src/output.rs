//! Artifact writers: CSV tables stamped with the config hash, JSON
//! sidecars, and the run manifest. All output is built in memory and
//! written in one call per file, so a failed run never leaves a partial
//! file behind.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use serde_json::{Map, Value};

use crate::config::Config;
use crate::CliError;
use quenchlab_core::ModeSpectrum;

/// Render a float for CSV. Magnitudes in [1e-4, 1e15) keep plain decimal
/// notation, everything else goes scientific; both forms round-trip
/// exactly, the split only keeps ordinary magnitudes readable.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Output directory plus the list of files written into it, in order.
pub struct OutDir {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutDir {
    pub fn new(dir: &std::path::Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// CSV with the standard two-line `#` preamble, a header row, and one
    /// line per row.
    pub fn write_csv<I>(
        &mut self,
        name: &str,
        subcommand: &str,
        hash: &str,
        header: &str,
        rows: I,
    ) -> Result<(), CliError>
    where
        I: IntoIterator<Item = String>,
    {
        let mut text = format!("# quenchlab {subcommand}\n# config_hash = {hash}\n{header}\n");
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write_bytes(name, text.as_bytes())
    }

    /// Pretty-printed JSON value. Object keys are emitted in sorted order,
    /// so the bytes are deterministic.
    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Pretty-printed JSON straight from a struct, preserving its field
    /// order (used for the canonical spectrum table, which other runs can
    /// load back).
    pub fn write_json_struct<T: serde::Serialize>(
        &mut self,
        name: &str,
        value: &T,
    ) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Io(format!("cannot serialize {name}: {e}")))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// The run manifest, written last so every file it lists already
    /// exists. The manifest itself is not in `outputs`.
    pub fn finish(
        mut self,
        subcommand: &str,
        hash: &str,
        seed: Option<u64>,
        started: Instant,
    ) -> Result<(), CliError> {
        let mut m = Map::new();
        m.insert("subcommand".into(), Value::from(subcommand));
        m.insert("config_hash".into(), Value::from(hash));
        m.insert("outputs".into(), Value::from(self.files.clone()));
        m.insert("wall_time".into(), Value::from(started.elapsed().as_secs_f64()));
        m.insert(
            "versions".into(),
            Value::from(format!(
                "quenchlab {} (quenchlab-core {})",
                env!("CARGO_PKG_VERSION"),
                quenchlab_core::VERSION
            )),
        );
        if let Some(s) = seed {
            m.insert("seed".into(), Value::from(s));
        }
        self.write_json("manifest.json", &Value::Object(m))
    }
}

/// Shared sidecar skeleton: run identity, the full resolved config, and the
/// spectrum metadata when the run had a single spectrum.
pub fn sidecar(
    subcommand: &str,
    hash: &str,
    cfg: &Config,
    spectrum: Option<&ModeSpectrum>,
    extra: Map<String, Value>,
) -> Value {
    let mut m = Map::new();
    m.insert("subcommand".into(), Value::from(subcommand));
    m.insert("config_hash".into(), Value::from(hash));
    let mut sections = Map::new();
    for (section, key, value) in cfg.entries() {
        sections
            .entry(section)
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .expect("section map")
            .insert(key, Value::from(value));
    }
    m.insert("config".into(), Value::Object(sections));
    if let Some(s) = spectrum {
        m.insert("spectrum_meta".into(), spectrum_meta(s));
    }
    m.extend(extra);
    Value::Object(m)
}

pub fn spectrum_meta(s: &ModeSpectrum) -> Value {
    serde_json::json!({
        "kind": s.kind,
        "alpha": s.alpha,
        "beta": s.beta,
        "size": s.size,
        "period_hint": s.period_hint,
    })
}
