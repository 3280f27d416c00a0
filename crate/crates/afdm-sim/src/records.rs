//! Result rows and their CSV form.
//!
//! One row per (SNR point, system, detector, source). The column order is
//! part of the tool's external contract — downstream plotting scripts key
//! on it — and every float is written with Rust's shortest-round-trip
//! formatting, so `read_csv(emit_csv(rows)) == rows` exactly and output
//! bytes are locale- and thread-count-independent.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::SimError;

pub const CSV_HEADER: &str = "snr_db,system,detector,source,bits,errors,ber";

/// Where a BER value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Monte Carlo count over simulated blocks.
    Sim,
    /// Closed-form union bound.
    Theory,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Sim => "sim",
            Source::Theory => "theory",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One BER measurement or bound.
///
/// Theory rows carry `bits = errors = 0`; `ber` then holds the bound value
/// rather than a ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub system: String,
    pub detector: String,
    pub source: Source,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
}

impl BerRecord {
    pub fn sim(snr_db: f64, system: &str, detector: &str, bits: u64, errors: u64) -> Self {
        debug_assert!(bits > 0);
        BerRecord {
            snr_db,
            system: system.into(),
            detector: detector.into(),
            source: Source::Sim,
            bits,
            errors,
            ber: errors as f64 / bits as f64,
        }
    }

    pub fn theory(snr_db: f64, system: &str, ber: f64) -> Self {
        BerRecord {
            snr_db,
            system: system.into(),
            detector: "-".into(),
            source: Source::Theory,
            bits: 0,
            errors: 0,
            ber,
        }
    }
}

/// Stable ordering for emission: by system, then SNR; sim and theory rows
/// for the same point stay in insertion order.
pub fn sort_records(records: &mut [BerRecord]) {
    records.sort_by(|a, b| {
        a.system
            .cmp(&b.system)
            .then(a.snr_db.partial_cmp(&b.snr_db).expect("SNR values are finite"))
    });
}

/// Renders records as CSV text with the fixed header.
pub fn to_csv(records: &[BerRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.snr_db, r.system, r.detector, r.source, r.bits, r.errors, r.ber
        ));
    }
    out
}

pub fn emit_csv(records: &[BerRecord], path: &Path) -> Result<(), SimError> {
    fs::write(path, to_csv(records)).map_err(|e| SimError::io(path, &e))
}

/// Parses a file produced by [`emit_csv`]; the inverse of `to_csv`.
pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>, SimError> {
    let text = fs::read_to_string(path).map_err(|e| SimError::io(path, &e))?;
    parse_csv(&text).map_err(|reason| SimError::Csv { path: path.display().to_string(), reason })
}

fn parse_csv(text: &str) -> Result<Vec<BerRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(format!("bad header {other:?}, expected {CSV_HEADER:?}")),
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!("line {}: expected 7 fields, got {}", idx + 2, fields.len()));
        }
        let num = |i: usize| -> Result<f64, String> {
            fields[i].parse().map_err(|_| format!("line {}: bad number {:?}", idx + 2, fields[i]))
        };
        let int = |i: usize| -> Result<u64, String> {
            fields[i].parse().map_err(|_| format!("line {}: bad count {:?}", idx + 2, fields[i]))
        };
        let source = match fields[3] {
            "sim" => Source::Sim,
            "theory" => Source::Theory,
            other => return Err(format!("line {}: unknown source {other:?}", idx + 2)),
        };
        records.push(BerRecord {
            snr_db: num(0)?,
            system: fields[1].into(),
            detector: fields[2].into(),
            source,
            bits: int(4)?,
            errors: int(5)?,
            ber: num(6)?,
        });
    }
    Ok(records)
}

/// Why a simulation point stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Collected the requested error count.
    MinErrors,
    /// Hit the trial cap first.
    TrialCap,
}

/// A simulated point with its bookkeeping (not serialized: the CSV schema
/// carries results, the run log carries provenance).
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub record: BerRecord,
    pub stop: StopReason,
    pub trials: u64,
}
