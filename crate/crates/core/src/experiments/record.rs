use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TargetFunction;

pub const VERSION: &str = concat!("ridgeless ", env!("CARGO_PKG_VERSION"));

/// One sweep cell, flat so it maps onto a CSV row and a JSON object with the
/// same field names. Estimates are `None` on error rows.
///
/// Column order: coordinates (d, n, c, c_ratio, seed, f0, m_test), Monte
/// Carlo estimates with their standard errors, norms and geometry
/// diagnostics, solver diagnostics, provenance (grid_hash, version, error).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub d: usize,
    pub n: usize,
    pub c: f64,
    pub c_ratio: f64,
    pub seed: u64,
    pub f0: TargetFunction,
    pub m_test: usize,
    /// E_P (f̂ − f₀)².
    pub risk_mean: Option<f64>,
    pub risk_se: Option<f64>,
    /// ‖f̂‖²_{L²(Ω)}.
    pub l2_fhat_mean: Option<f64>,
    pub l2_fhat_se: Option<f64>,
    /// ‖f₀‖²_{L²(Ω)}, exact.
    pub l2_f0: Option<f64>,
    pub convention_norm_fhat: Option<f64>,
    pub witness_norm: Option<f64>,
    pub certificate: Option<f64>,
    pub sum_rd: Option<f64>,
    /// Power averages (1/n)Σ r_i^k for k = −1, 1, d.
    pub pavg_m1: Option<f64>,
    pub pavg_1: Option<f64>,
    pub pavg_d: Option<f64>,
    pub jitter_used: Option<f64>,
    pub condition_estimate: Option<f64>,
    pub residual_max: Option<f64>,
    pub grid_hash: String,
    pub version: String,
    /// Empty unless the cell failed.
    pub error: String,
}

impl SweepRecord {
    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }

    /// Usable in summaries: computed without error and without jitter.
    pub fn is_clean(&self) -> bool {
        !self.is_error() && self.jitter_used == Some(0.0)
    }

    pub fn sort_key(&self) -> (usize, usize, f64, u64) {
        (self.d, self.n, self.c, self.seed)
    }

    pub fn coordinates(&self) -> String {
        format!("d={} n={} c={} seed={}", self.d, self.n, self.c, self.seed)
    }
}

/// Canonical order: by d, n, c, seed.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        (a.d, a.n)
            .cmp(&(b.d, b.n))
            .then(a.c.total_cmp(&b.c))
            .then(a.seed.cmp(&b.seed))
    });
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn format_err(path: &Path, message: impl ToString) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn require_records(records: &[SweepRecord]) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no records to write".into()));
    }
    Ok(())
}

pub fn write_csv(records: &[SweepRecord], out: impl Write) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Header plus one row per record, LF line endings, shortest round-trip floats.
pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    require_records(records)?;
    let file = create(path)?;
    write_csv(records, file).map_err(|e| format_err(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let mut r = csv::Reader::from_reader(open(path)?);
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format_err(path, e))
}

/// An array of flat objects with the CSV field names.
pub fn emit_json(records: &[SweepRecord], path: &Path) -> Result<()> {
    require_records(records)?;
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, records).map_err(|e| format_err(path, e))?;
    file.write_all(b"\n")
        .and_then(|_| file.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json(path: &Path) -> Result<Vec<SweepRecord>> {
    serde_json::from_reader(open(path)?).map_err(|e| format_err(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordFormat {
    Csv,
    Json,
}

impl RecordFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(RecordFormat::Csv),
            Some("json") => Ok(RecordFormat::Json),
            _ => Err(Error::Config(format!(
                "{}: record files must end in .csv or .json",
                path.display()
            ))),
        }
    }
}

pub fn emit_records(records: &[SweepRecord], path: &Path) -> Result<()> {
    match RecordFormat::from_path(path)? {
        RecordFormat::Csv => emit_csv(records, path),
        RecordFormat::Json => emit_json(records, path),
    }
}

pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>> {
    match RecordFormat::from_path(path)? {
        RecordFormat::Csv => read_csv(path),
        RecordFormat::Json => read_json(path),
    }
}

#[cfg(test)]
pub(crate) fn sample_record() -> SweepRecord {
    SweepRecord {
        d: 1,
        n: 10,
        c: 1.0,
        c_ratio: 0.1,
        seed: 1,
        f0: TargetFunction::ConstOne,
        m_test: 100,
        risk_mean: Some(0.1 + 0.2),
        risk_se: Some(1.0 / 3.0),
        l2_fhat_mean: Some(std::f64::consts::PI),
        l2_fhat_se: Some(1e-300),
        l2_f0: Some(2.0),
        convention_norm_fhat: Some(123456789.123456789),
        witness_norm: Some(5e-324),
        certificate: Some(f64::MAX),
        sum_rd: Some(0.7),
        pavg_m1: Some(33.3),
        pavg_1: Some(0.03),
        pavg_d: Some(0.03),
        jitter_used: Some(0.0),
        condition_estimate: Some(12.5),
        residual_max: Some(2.2e-16),
        grid_hash: "0123456789abcdef".into(),
        version: VERSION.into(),
        error: String::new(),
    }
}
