//! File formats: per-repetition trace CSVs, `key: value` summaries and
//! plain-text objective vector lists.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use moea_core::{ObjectiveVector, TraceRecord};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const TRACE_HEADER: [&str; 5] = ["iteration", "coverage_P", "coverage_R", "positive_cdis", "evaluations"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    #[serde(rename = "coverage_P")]
    pub coverage_p: usize,
    #[serde(rename = "coverage_R")]
    pub coverage_r: usize,
    pub positive_cdis: usize,
    pub evaluations: u64,
}

impl From<&TraceRecord> for TraceRow {
    fn from(r: &TraceRecord) -> Self {
        Self {
            iteration: r.iteration,
            coverage_p: r.coverage_p,
            coverage_r: r.coverage_r,
            positive_cdis: r.positive_cdis,
            evaluations: r.evaluations,
        }
    }
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| HarnessError::io(path, e))
}

pub fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| HarnessError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Streams trace rows to a CSV file as they are produced.
pub struct TraceWriter {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl TraceWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(create_file(path)?);
        inner.write_record(TRACE_HEADER)?;
        Ok(Self { path: path.to_path_buf(), inner })
    }

    pub fn write(&mut self, record: &TraceRecord) -> Result<()> {
        Ok(self.inner.serialize(TraceRow::from(record))?)
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| HarnessError::io(&self.path, e))
    }
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(HarnessError::Usage(format!("{}: unexpected trace header {header:?}", path.display())));
    }
    Ok(reader.deserialize().collect::<Result<_, _>>()?)
}

/// Ordered `key: value` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut summary = Self::default();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(": ")
                .ok_or_else(|| HarnessError::Usage(format!("summary line {}: expected `key: value`", i + 1)))?;
            summary.push(k, v);
        }
        Ok(summary)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?)
    }
}

/// Parses one objective vector per line, comma-separated non-negative
/// integers. Blank lines and lines starting with `#` are skipped.
pub fn parse_vectors(text: &str) -> Result<Vec<ObjectiveVector>> {
    let mut out: Vec<ObjectiveVector> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| HarnessError::Usage(format!("line {}: {e}", i + 1)))?;
        if let Some(first) = out.first() {
            if first.len() != values.len() {
                return Err(HarnessError::Usage(format!(
                    "line {}: expected {} values, found {}",
                    i + 1,
                    first.len(),
                    values.len()
                )));
            }
        }
        out.push(ObjectiveVector::new(values));
    }
    if out.is_empty() {
        return Err(HarnessError::Usage("no objective vectors found".into()));
    }
    Ok(out)
}
