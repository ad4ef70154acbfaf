//! Artifact writing. Reports are pure functions of config and seed; everything that
//! varies between runs (time, thread count) goes in the manifest only.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::Format;
use super::Command;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: &'static str,
    pub config_sha256: String,
    pub varlp_version: &'static str,
    pub seed: Option<u64>,
    pub strict: bool,
    pub threads: usize,
    pub timestamp_unix: u64,
    pub files: Vec<String>,
}

pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects artifacts in memory and writes them in one go.
pub struct Sink {
    dir: PathBuf,
    formats: Vec<Format>,
    files: Vec<(String, Vec<u8>)>,
}

impl Sink {
    pub fn new(dir: &Path, formats: &[Format]) -> Self {
        Self { dir: dir.to_path_buf(), formats: formats.to_vec(), files: Vec::new() }
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        if !self.formats.contains(&Format::Json) {
            return Ok(());
        }
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.files.push((name.to_string(), text));
        Ok(())
    }

    /// `rows` are already formatted cells; see [`cell`].
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
        if !self.formats.contains(&Format::Csv) {
            return Ok(());
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.files.push((name.to_string(), bytes));
        Ok(())
    }

    pub fn finish(self, mut manifest: Manifest) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        for (name, bytes) in &self.files {
            fs::write(self.dir.join(name), bytes)?;
        }
        manifest.files = self.files.into_iter().map(|f| f.0).collect();
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        fs::write(self.dir.join("manifest.json"), text)
    }
}

/// Shortest round-trip form; empty for a missing value.
pub fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_nan() => "nan".into(),
        Some(x) if x == f64::INFINITY => "inf".into(),
        Some(x) if x == f64::NEG_INFINITY => "-inf".into(),
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

pub fn report_file(command: Command) -> String {
    format!("{}.json", command.as_str())
}
