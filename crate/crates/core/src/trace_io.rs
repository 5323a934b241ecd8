//! Trace export and import.
//!
//! CSV: header `k,f,gap,alpha,e,L,time_ns`, one row per record, reals with 17
//! significant digits, `L` empty when absent. JSON: the full trace plus an
//! echo of the run configuration.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::synth::fmt17;
use crate::solver::{IterRecord, RunTrace};

pub const CSV_HEADER: [&str; 7] = ["k", "f", "gap", "alpha", "e", "L", "time_ns"];

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub f: f64,
    pub gap: f64,
    pub alpha: f64,
    pub e: f64,
    pub lipschitz: Option<f64>,
    pub time_ns: u64,
}

impl From<&IterRecord> for TraceRow {
    fn from(r: &IterRecord) -> Self {
        Self {
            k: r.k,
            f: r.f,
            gap: r.gap,
            alpha: r.alpha,
            e: r.e,
            lipschitz: r.lipschitz,
            time_ns: r.time_ns,
        }
    }
}

pub fn write_trace_csv<W: Write>(out: W, records: &[IterRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.k.to_string(),
            fmt17(r.f),
            fmt17(r.gap),
            fmt17(r.alpha),
            fmt17(r.e),
            r.lipschitz.map(fmt17).unwrap_or_default(),
            r.time_ns.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<trace csv>", e))?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected trace header `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let real = |j: usize| -> Result<f64> {
            rec[j].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad {} value `{}`", CSV_HEADER[j], &rec[j]),
            })
        };
        let int = |j: usize| -> Result<u64> {
            rec[j].parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad {} value `{}`", CSV_HEADER[j], &rec[j]),
            })
        };
        rows.push(TraceRow {
            k: int(0)? as usize,
            f: real(1)?,
            gap: real(2)?,
            alpha: real(3)?,
            e: real(4)?,
            lipschitz: if rec[5].is_empty() { None } else { Some(real(5)?) },
            time_ns: int(6)?,
        });
    }
    Ok(rows)
}

pub fn save_trace_csv(path: impl AsRef<Path>, records: &[IterRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace_csv(std::io::BufWriter::new(file), records)
}

pub fn load_trace_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_trace_csv(std::io::BufReader::new(file))
}

/// JSON document for one run. Non-finite reals serialize as `null`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDocument<C> {
    pub config: C,
    #[serde(flatten)]
    pub trace: RunTrace,
}

pub fn save_trace_json<C: Serialize>(path: impl AsRef<Path>, config: &C, trace: &RunTrace) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(
        std::io::BufWriter::new(file),
        &TraceDocument {
            config,
            trace: trace.clone(),
        },
    )?;
    Ok(())
}
