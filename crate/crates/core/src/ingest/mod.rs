//! Frequency tables from archived line-delimited JSON records.
//!
//! Each non-blank line is one record. The contributor id is read at a
//! dot-separated path and may be a string or an integer; integers are
//! canonicalised to their decimal string so `"42"` and `42` are the same
//! contributor. Every record counts once.
//!
//! Input can be split into newline-aligned shards, tallied independently and
//! merged. The result is identical to a single sequential pass, including
//! which line an `abort` error reports.

mod table_file;

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use flate2::read::MultiGzDecoder;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::freqtable::FrequencyTable;

pub use table_file::{load_table, read_table, save_table, write_table, TABLE_HEADER};

/// Dot-separated field path into a record, e.g. `user.id_str`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdPath(Vec<String>);

impl IdPath {
    pub fn segments(&self) -> &[String] {
        &self.0
    }

    fn resolve<'v>(&self, record: &'v Value) -> Option<&'v Value> {
        self.0.iter().try_fold(record, |v, key| v.get(key.as_str()))
    }
}

impl FromStr for IdPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let segments: Vec<String> = s.split('.').map(str::to_owned).collect();
        if s.is_empty() || segments.iter().any(String::is_empty) {
            return Err(Error::InvalidIdPath(s.to_owned()));
        }
        Ok(IdPath(segments))
    }
}

impl fmt::Display for IdPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnMalformed {
    #[default]
    SkipAndCount,
    Abort,
}

impl FromStr for OnMalformed {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "skip" | "skip_and_count" => Ok(OnMalformed::SkipAndCount),
            "abort" => Ok(OnMalformed::Abort),
            other => Err(format!("unknown malformed-record policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    pub id_path: IdPath,
    pub on_malformed: OnMalformed,
}

impl IngestConfig {
    pub fn new(id_path: &str, on_malformed: OnMalformed) -> Result<Self> {
        Ok(Self {
            id_path: id_path.parse()?,
            on_malformed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestReport {
    pub records_read: u64,
    pub records_counted: u64,
    pub records_skipped: u64,
    pub table: FrequencyTable,
}

/// Mutable per-shard accumulator. State is O(distinct contributors).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    counts: HashMap<String, u64>,
    records_read: u64,
    records_counted: u64,
    records_skipped: u64,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Distinct contributors seen so far.
    pub fn contributors(&self) -> usize {
        self.counts.len()
    }

    pub fn records_read(&self) -> u64 {
        self.records_read
    }

    /// Processes one raw line. Blank lines are not records and are ignored.
    pub fn push_line(&mut self, line: &[u8], line_no: u64, cfg: &IngestConfig) -> Result<()> {
        let line = line.strip_suffix(b"\n").unwrap_or(line);
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if line.iter().all(u8::is_ascii_whitespace) {
            return Ok(());
        }
        self.records_read += 1;
        match extract_id(line, &cfg.id_path) {
            Ok(id) => {
                *self.counts.entry(id).or_insert(0) += 1;
                self.records_counted += 1;
                Ok(())
            }
            Err(reason) => match cfg.on_malformed {
                OnMalformed::SkipAndCount => {
                    self.records_skipped += 1;
                    Ok(())
                }
                OnMalformed::Abort => Err(Error::MalformedRecord {
                    line: line_no,
                    reason,
                }),
            },
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        let (mut big, small) = if self.counts.len() >= other.counts.len() {
            (std::mem::take(&mut self.counts), other.counts)
        } else {
            (other.counts, std::mem::take(&mut self.counts))
        };
        for (id, c) in small {
            *big.entry(id).or_insert(0) += c;
        }
        Tally {
            counts: big,
            records_read: self.records_read + other.records_read,
            records_counted: self.records_counted + other.records_counted,
            records_skipped: self.records_skipped + other.records_skipped,
        }
    }

    /// Freezes the tally. Fails with `EmptyTable` if nothing was counted.
    pub fn into_report(self) -> Result<IngestReport> {
        Ok(IngestReport {
            records_read: self.records_read,
            records_counted: self.records_counted,
            records_skipped: self.records_skipped,
            table: FrequencyTable::from_tally(self.counts)?,
        })
    }
}

fn extract_id(line: &[u8], path: &IdPath) -> std::result::Result<String, String> {
    let record: Value = serde_json::from_slice(line).map_err(|e| format!("invalid JSON: {e}"))?;
    match path.resolve(&record) {
        None | Some(Value::Null) => Err(format!("no value at {path}")),
        Some(Value::String(s)) if s.is_empty() => Err(format!("empty id at {path}")),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(Value::Number(n)) if n.is_u64() || n.is_i64() => Ok(n.to_string()),
        Some(other) => Err(format!("id at {path} is not a string or integer: {other}")),
    }
}

fn tally_reader<R: BufRead>(mut reader: R, cfg: &IngestConfig, first_line: u64) -> Result<Tally> {
    let mut tally = Tally::new();
    let mut buf = Vec::with_capacity(4096);
    let mut line_no = first_line;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        tally.push_line(&buf, line_no, cfg)?;
        line_no += 1;
    }
    Ok(tally)
}

/// Single sequential pass over a record stream.
pub fn ingest_stream<R: BufRead>(reader: R, cfg: &IngestConfig) -> Result<IngestReport> {
    tally_reader(reader, cfg, 1)?.into_report()
}

/// Newline-aligned byte ranges, with the 1-based number of each range's first line.
fn shard_ranges(data: &[u8], shards: usize) -> Vec<(usize, usize, u64)> {
    let shards = shards.max(1);
    let mut ranges = Vec::with_capacity(shards);
    let mut start = 0;
    let mut line = 1u64;
    for k in 1..=shards {
        if start >= data.len() {
            break;
        }
        let end = if k == shards {
            data.len()
        } else {
            let target = (data.len() as u128 * k as u128 / shards as u128) as usize;
            if target <= start {
                continue;
            }
            match data[target - 1..].iter().position(|&b| b == b'\n') {
                Some(off) => target + off,
                None => data.len(),
            }
        };
        ranges.push((start, end, line));
        line += data[start..end].iter().filter(|&&b| b == b'\n').count() as u64;
        start = end;
    }
    ranges
}

/// Ingests an in-memory archive split into `shards` pieces.
pub fn ingest_bytes(
    data: &[u8],
    cfg: &IngestConfig,
    shards: usize,
    exec: Execution,
) -> Result<IngestReport> {
    let ranges = shard_ranges(data, shards);
    let results = exec.map(&ranges, |&(start, end, first_line)| {
        tally_reader(&data[start..end], cfg, first_line)
    });
    let mut merged = Tally::new();
    let mut first_error: Option<Error> = None;
    for result in results {
        match result {
            Ok(t) => merged = merged.merge(t),
            // Shards are in file order, so the first error is the earliest line.
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => merged.into_report(),
    }
}

/// Opens a record archive, transparently decompressing gzip.
pub fn open_records(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut reader = BufReader::new(File::open(path)?);
    let is_gzip = reader.fill_buf()?.starts_with(&[0x1f, 0x8b]);
    if is_gzip {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

/// Ingests a file. One shard streams in constant memory; more shards load
/// the (decompressed) archive into memory first.
pub fn ingest_path(
    path: &Path,
    cfg: &IngestConfig,
    shards: usize,
    exec: Execution,
) -> Result<IngestReport> {
    let mut reader = open_records(path)?;
    if shards <= 1 {
        return ingest_stream(reader, cfg);
    }
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    ingest_bytes(&data, cfg, shards, exec)
}
