//! Parsing and filtering of raw call-record logs.
//!
//! The external format is line-delimited CSV with a fixed column order
//! `caller,callee,timestamp,duration,call_type` and an optional header.
//! Rows are either accepted, skipped (well-formed but filtered out), or
//! malformed; the three counts always add up to the number of input rows.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DecayError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CallType {
    Voice,
    Text,
    Voicemail,
}

impl FromStr for CallType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "voice" => Ok(CallType::Voice),
            "text" => Ok(CallType::Text),
            "voicemail" => Ok(CallType::Voicemail),
            other => Err(format!("unknown call type {other:?}")),
        }
    }
}

impl fmt::Display for CallType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CallType::Voice => "voice",
            CallType::Text => "text",
            CallType::Voicemail => "voicemail",
        };
        f.write_str(s)
    }
}

/// One directed call event between two subscribers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub caller: String,
    pub callee: String,
    /// Seconds since epoch.
    pub timestamp: i64,
    /// Call duration in seconds.
    pub duration: u64,
    pub call_type: CallType,
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub horizon_start: i64,
    pub horizon_end: i64,
    /// Call types to keep; everything else is skipped.
    pub keep_call_types: Vec<CallType>,
    /// Abort on the first malformed row instead of skipping it.
    pub strict: bool,
    /// Whether the input starts with a header row.
    pub has_header: bool,
    /// Calls shorter than this are skipped (0 keeps zero-duration calls).
    pub min_duration: u64,
    /// When present, both endpoints must be in this set.
    pub in_network_ids: Option<HashSet<String>>,
}

impl IngestConfig {
    pub fn new(horizon_start: i64, horizon_end: i64) -> Result<Self> {
        if horizon_start >= horizon_end {
            return Err(DecayError::InvalidConfig(format!(
                "horizon_start ({horizon_start}) must be < horizon_end ({horizon_end})"
            )));
        }
        Ok(IngestConfig {
            horizon_start,
            horizon_end,
            keep_call_types: vec![CallType::Voice],
            strict: false,
            has_header: false,
            min_duration: 0,
            in_network_ids: None,
        })
    }

    fn keeps(&self, t: CallType) -> bool {
        self.keep_call_types.contains(&t)
    }
}

/// Per-category row counts for one ingest pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub total: u64,
    pub accepted: u64,
    pub filtered_type: u64,
    pub out_of_horizon: u64,
    pub self_calls: u64,
    pub below_min_duration: u64,
    pub out_of_network: u64,
    pub malformed: u64,
}

impl IngestReport {
    /// Well-formed rows that were filtered out.
    pub fn skipped(&self) -> u64 {
        self.filtered_type
            + self.out_of_horizon
            + self.self_calls
            + self.below_min_duration
            + self.out_of_network
    }
}

/// Streaming reader over a call-record CSV source.
///
/// Iteration yields accepted records in input order; skip and malformed
/// counts accumulate in the report, available once iteration is done.
pub struct RecordReader<R: Read> {
    rows: csv::StringRecordsIntoIter<R>,
    cfg: IngestConfig,
    report: IngestReport,
    fatal: bool,
}

impl<R: Read> RecordReader<R> {
    pub fn new(source: R, cfg: IngestConfig) -> Self {
        let rows = csv::ReaderBuilder::new()
            .has_headers(cfg.has_header)
            .flexible(true)
            .from_reader(source)
            .into_records();
        RecordReader {
            rows,
            cfg,
            report: IngestReport::default(),
            fatal: false,
        }
    }

    pub fn report(&self) -> IngestReport {
        self.report
    }

    fn malformed(&mut self, row: u64, reason: String) -> Option<Result<CallRecord>> {
        self.report.malformed += 1;
        if self.cfg.strict {
            self.fatal = true;
            Some(Err(DecayError::MalformedRecord { row, reason }))
        } else {
            None
        }
    }

    /// Parses one raw row; `Ok(None)` means the row was counted as skipped.
    fn classify(&mut self, record: &csv::StringRecord) -> std::result::Result<Option<CallRecord>, String> {
        if record.len() != 5 {
            return Err(format!("expected 5 columns, got {}", record.len()));
        }
        let caller = record[0].trim();
        let callee = record[1].trim();
        if caller.is_empty() || callee.is_empty() {
            return Err("empty vertex id".to_string());
        }
        let timestamp: i64 = record[2]
            .trim()
            .parse()
            .map_err(|_| format!("bad timestamp {:?}", &record[2]))?;
        let duration: u64 = record[3]
            .trim()
            .parse()
            .map_err(|_| format!("bad duration {:?}", &record[3]))?;
        let call_type: CallType = record[4].parse()?;

        if !self.cfg.keeps(call_type) {
            self.report.filtered_type += 1;
            return Ok(None);
        }
        if timestamp < self.cfg.horizon_start || timestamp >= self.cfg.horizon_end {
            self.report.out_of_horizon += 1;
            return Ok(None);
        }
        if caller == callee {
            self.report.self_calls += 1;
            return Ok(None);
        }
        if duration < self.cfg.min_duration {
            self.report.below_min_duration += 1;
            return Ok(None);
        }
        if let Some(ids) = &self.cfg.in_network_ids {
            if !ids.contains(caller) || !ids.contains(callee) {
                self.report.out_of_network += 1;
                return Ok(None);
            }
        }
        Ok(Some(CallRecord {
            caller: caller.to_string(),
            callee: callee.to_string(),
            timestamp,
            duration,
            call_type,
        }))
    }
}

impl<R: Read> Iterator for RecordReader<R> {
    type Item = Result<CallRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.fatal {
            return None;
        }
        loop {
            let row = match self.rows.next()? {
                Ok(r) => r,
                Err(e) => {
                    self.report.total += 1;
                    let line = e.position().map(|p| p.line()).unwrap_or(0);
                    match self.malformed(line, e.to_string()) {
                        Some(err) => return Some(err),
                        None => continue,
                    }
                }
            };
            self.report.total += 1;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            match self.classify(&row) {
                Ok(Some(rec)) => {
                    self.report.accepted += 1;
                    return Some(Ok(rec));
                }
                Ok(None) => continue,
                Err(reason) => match self.malformed(line, reason) {
                    Some(err) => return Some(err),
                    None => continue,
                },
            }
        }
    }
}

/// Reads an entire source, returning the accepted records plus the report.
pub fn parse_records<R: Read>(source: R, cfg: &IngestConfig) -> Result<(Vec<CallRecord>, IngestReport)> {
    let mut reader = RecordReader::new(source, cfg.clone());
    let mut records = Vec::new();
    for rec in &mut reader {
        records.push(rec?);
    }
    Ok((records, reader.report()))
}

pub fn parse_records_file(path: &Path, cfg: &IngestConfig) -> Result<(Vec<CallRecord>, IngestReport)> {
    let file = std::fs::File::open(path)?;
    parse_records(std::io::BufReader::new(file), cfg)
}

/// Writes records back out in the external CSV format, with a header.
pub fn write_records_csv(path: &Path, records: &[CallRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["caller", "callee", "timestamp", "duration", "call_type"])?;
    for r in records {
        w.write_record([
            r.caller.as_str(),
            r.callee.as_str(),
            &r.timestamp.to_string(),
            &r.duration.to_string(),
            &r.call_type.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
