//! CSV and JSON writers. Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qotto_core::Histogram;
use serde::Serialize;

use crate::CliError;

pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Collects the files of one run under a common `<kind>_seed<seed>_` prefix.
pub struct ArtifactWriter {
    dir: PathBuf,
    prefix: String,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, kind: &str, seed: u64) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), prefix: format!("{kind}_seed{seed}_"), written: Vec::new() })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{}{name}", self.prefix))
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn file_names(&self) -> Vec<String> {
        self.written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect()
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let path = self.path(&format!("{name}.csv"));
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(&path)?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn histogram(&mut self, name: &str, h: &Histogram) -> Result<PathBuf, CliError> {
        let rows = (0..h.bins()).map(|i| {
            vec![num(h.edges()[i]), num(h.edges()[i + 1]), h.counts()[i].to_string(), num(h.density(i))]
        });
        self.csv(name, &["lower", "upper", "count", "density"], rows)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(&format!("{name}.json"));
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Under/overflow counts that do not fit the per-bin CSV.
#[derive(Debug, Clone, Serialize)]
pub struct HistogramInfo {
    pub bins: usize,
    pub total: u64,
    pub underflow: u64,
    pub overflow: u64,
}

impl From<&Histogram> for HistogramInfo {
    fn from(h: &Histogram) -> Self {
        Self { bins: h.bins(), total: h.total(), underflow: h.underflow(), overflow: h.overflow() }
    }
}
