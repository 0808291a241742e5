//! Trajectory traces as CSV.
//!
//! One row per agent per recorded instant. The first line is a `#`
//! comment stating units; floats are written in shortest round-trip form so
//! reading a trace back reproduces it bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::TraceError;

pub const HEADER: [&str; 10] = ["t", "id", "kind", "x", "y", "heading", "eta", "mu", "sigma", "zeta"];

const UNITS: &str = "# t [s]; x, y [m]; heading [rad]; eta, mu in {0,1}, sigma, zeta in [0,1], herders only";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Herder,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub id: usize,
    pub kind: AgentKind,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub eta: Option<u8>,
    pub mu: Option<u8>,
    pub sigma: Option<f64>,
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    /// Distinct record times in order.
    pub fn times(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.records {
            if out.last() != Some(&r.t) {
                out.push(r.t);
            }
        }
        out
    }

    /// Records at each distinct time, in order.
    pub fn frames(&self) -> Vec<&[TraceRecord]> {
        self.records.chunk_by(|a, b| a.t == b.t).collect()
    }
}

pub fn write_trace_to<W: Write>(trace: &Trace, mut out: W) -> Result<(), TraceError> {
    writeln!(out, "{UNITS}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for r in &trace.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_from<R: Read>(input: R) -> Result<Trace, TraceError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(TraceError::Schema(format!(
            "expected columns {}, found {}",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let records = r.deserialize().collect::<Result<Vec<TraceRecord>, _>>()?;
    for pair in records.windows(2) {
        if pair[1].t < pair[0].t {
            return Err(TraceError::Schema(format!("time goes backwards at t = {}", pair[1].t)));
        }
    }
    Ok(Trace { records })
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<(), TraceError> {
    let f = std::fs::File::create(path)?;
    write_trace_to(trace, std::io::BufWriter::new(f))
}

pub fn read_trace(path: &Path) -> Result<Trace, TraceError> {
    let f = std::fs::File::open(path)?;
    read_trace_from(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        Trace {
            records: vec![
                TraceRecord {
                    t: 0.0,
                    id: 0,
                    kind: AgentKind::Herder,
                    x: 0.1 + 0.2,
                    y: -1.0 / 3.0,
                    heading: 2.5,
                    eta: Some(1),
                    mu: Some(0),
                    sigma: Some(0.25),
                    zeta: Some(1.0),
                },
                TraceRecord {
                    t: 0.0,
                    id: 0,
                    kind: AgentKind::Target,
                    x: 1e-300,
                    y: 12345.678901234567,
                    heading: 0.0,
                    eta: None,
                    mu: None,
                    sigma: None,
                    zeta: None,
                },
            ],
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let mut buf = Vec::new();
        write_trace_to(&sample(), &mut buf).unwrap();
        let back = read_trace_from(buf.as_slice()).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace_to(&Trace::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], HEADER.join(","));
        assert_eq!(read_trace_from(text.as_bytes()).unwrap(), Trace::default());
    }

    #[test]
    fn wrong_header_is_schema_error() {
        let text = "t,id,kind,x,y\n0,0,herder,1,2\n";
        assert!(matches!(read_trace_from(text.as_bytes()), Err(TraceError::Schema(_))));
    }

    #[test]
    fn bad_kind_is_csv_error() {
        let text = format!("{}\n0,0,dog,1,2,0,,,,\n", HEADER.join(","));
        assert!(matches!(read_trace_from(text.as_bytes()), Err(TraceError::Csv(_))));
    }

    #[test]
    fn frames_group_by_time() {
        let mut t = sample();
        let mut later = t.records[1];
        later.t = 0.5;
        t.records.push(later);
        assert_eq!(t.times(), vec![0.0, 0.5]);
        assert_eq!(t.frames().iter().map(|f| f.len()).collect::<Vec<_>>(), vec![2, 1]);
    }
}
