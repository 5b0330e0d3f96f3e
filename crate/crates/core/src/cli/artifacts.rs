//! Output directory bookkeeping: every artifact is hashed into a manifest.
//! Wall-clock timings go to a separate file that the manifest leaves out,
//! so identical runs produce identical manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST: &str = "manifest.json";
pub const TIMINGS: &str = "timings.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    config_hash: &'a str,
    action: &'a str,
    artifacts: &'a BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    hashes: BTreeMap<String, String>,
    timings: Vec<(String, f64)>,
}

/// A CSV table built row by row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            hashes: BTreeMap::new(),
            timings: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.hashes.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::NonFinite(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn csv(&mut self, name: &str, table: Table) -> Result<()> {
        self.write(name, &table.into_bytes())
    }

    pub fn time(&mut self, label: impl Into<String>, seconds: f64) {
        self.timings.push((label.into(), seconds));
    }

    /// Writes the manifest and the timings file; returns the manifest path.
    pub fn finish(self, config_hash: &str, action: &str) -> Result<PathBuf> {
        let manifest = Manifest {
            config_hash,
            action,
            artifacts: &self.hashes,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::NonFinite(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, text)?;
        let timings: BTreeMap<&str, f64> = self.timings.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        std::fs::write(
            self.dir.join(TIMINGS),
            serde_json::to_string_pretty(&timings).map_err(|e| Error::NonFinite(e.to_string()))? + "\n",
        )?;
        Ok(path)
    }
}

/// Shortest round-trip formatting, stable across runs.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_hashes_but_not_timings() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = Artifacts::create(dir.path()).unwrap();
        a.write("x.txt", b"abc").unwrap();
        a.time("x", 1.5);
        let path = a.finish("h", "solve").unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
        assert!(!text.contains(TIMINGS));
        assert!(dir.path().join(TIMINGS).is_file());
    }
}
