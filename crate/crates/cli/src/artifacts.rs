//! Output plumbing shared by all subcommands: CSV and SVG emission into the
//! run directory, content hashing, pass-flag bookkeeping, and the manifest
//! that ties a run back to its exact configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub struct Emitter {
    out_dir: PathBuf,
    files: Vec<FileRecord>,
    passes: BTreeMap<String, bool>,
    notes: Vec<String>,
    started: Instant,
}

#[derive(Debug, Clone, Serialize)]
struct FileRecord {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: String,
    command: &'a str,
    created: String,
    wall_seconds: f64,
    completed: bool,
    notes: &'a [String],
    config: &'a RunConfig,
    passes: &'a BTreeMap<String, bool>,
    files: &'a [FileRecord],
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Emitter {
    pub fn new(out_dir: &std::path::Path) -> Result<Emitter> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(Emitter {
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
            passes: BTreeMap::new(),
            notes: Vec::new(),
            started: Instant::now(),
        })
    }

    fn record(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(FileRecord {
            path: name.to_string(),
            sha256: hex(&Sha256::digest(bytes)),
        });
        Ok(())
    }

    /// Writes one CSV file: a header row then the given records, '.' as the
    /// decimal separator, UTF-8 throughout.
    pub fn write_csv<R, F>(&mut self, name: &str, header: &[&str], rows: R) -> Result<()>
    where
        R: IntoIterator<Item = F>,
        F: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.into_iter().collect::<Vec<_>>())?;
        }
        let bytes = w.into_inner()?;
        self.record(name, &bytes)
    }

    pub fn write_text(&mut self, name: &str, content: &str) -> Result<()> {
        self.record(name, content.as_bytes())
    }

    pub fn pass(&mut self, key: &str, ok: bool) {
        self.passes.insert(key.to_string(), ok);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passes(&self) -> impl Iterator<Item = (&String, bool)> {
        self.passes.iter().map(|(k, &v)| (k, v))
    }

    pub fn all_passed(&self) -> bool {
        self.passes.values().all(|&v| v)
    }

    /// Writes the manifest and returns whether every pass flag held. The
    /// manifest embeds the configuration verbatim, so parsing its [config]
    /// table reproduces the run inputs exactly.
    pub fn finish(self, command: &str, cfg: &RunConfig, completed: bool) -> Result<bool> {
        let manifest = Manifest {
            tool: format!("currentlab {}", env!("CARGO_PKG_VERSION")),
            command,
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            wall_seconds: self.started.elapsed().as_secs_f64(),
            completed,
            notes: &self.notes,
            config: cfg,
            passes: &self.passes,
            files: &self.files,
        };
        let text = toml::to_string_pretty(&manifest).context("serializing manifest")?;
        let path = self.out_dir.join("manifest.toml");
        fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.all_passed() && completed)
    }
}

/// Shortest round-trip decimal form, stable across runs for equal values.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_config_table_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        let mut em = Emitter::new(dir.path()).unwrap();
        em.write_csv("t.csv", &["a", "b"], [[num(1.5), num(2.0)]]).unwrap();
        em.pass("unit.ok", true);
        assert!(em.finish("mass", &cfg, true).unwrap());

        let text = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
        let value: toml::Value = text.parse().unwrap();
        let back: RunConfig = value["config"].clone().try_into().unwrap();
        assert_eq!(back, cfg);
        let listed = value["files"].as_array().unwrap();
        assert_eq!(listed.len(), 1);
        assert_eq!(listed[0]["path"].as_str().unwrap(), "t.csv");
        assert_eq!(listed[0]["sha256"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn failed_flags_sink_the_run() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default();
        let mut em = Emitter::new(dir.path()).unwrap();
        em.pass("x", true);
        em.pass("y", false);
        assert!(!em.finish("ddc", &cfg, true).unwrap());
    }
}
