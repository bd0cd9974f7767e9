//! Sweep reports: one record per `(s, p, gamma, N, family, space)` cell.
//!
//! CSV columns are `s,p,gamma,N,family,space,ratio,admissible`; JSON is an
//! array of records with the same fields. Floats use the shortest
//! round-trip representation with `.` as decimal separator.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s: f64,
    pub p: f64,
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub family: String,
    pub space: String,
    pub ratio: f64,
    pub admissible: bool,
}

/// Run metadata emitted alongside the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub seed: u64,
    pub dim: usize,
    pub half_width: f64,
    /// `(N, K)` for every resolution in the run.
    pub levels: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Report(e.to_string())
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["s", "p", "gamma", "N", "family", "space", "ratio", "admissible"])
            .map_err(io_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_csv(input: impl Read) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(io_err))
        .collect()
}

pub fn write_json(rows: &[SweepRow], mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(io_err)?;
    out.write_all(b"\n").map_err(io_err)
}

pub fn read_json(input: impl Read) -> Result<Vec<SweepRow>> {
    serde_json::from_reader(input).map_err(io_err)
}

pub fn write_rows(rows: &[SweepRow], format: Format, out: impl Write) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<SweepRow> {
        vec![
            SweepRow {
                s: 0.3,
                p: 2.0,
                gamma: -0.5,
                n: 256,
                family: "scale_ladder".into(),
                space: "F(q=inf)".into(),
                ratio: 1.234_567_890_123_4,
                admissible: true,
            },
            SweepRow {
                s: 0.6,
                p: 1.5,
                gamma: 0.0,
                n: 2048,
                family: "gaussian(c=2,w=1)".into(),
                space: "H".into(),
                ratio: 3.0e-7,
                admissible: false,
            },
        ]
    }

    #[test]
    fn csv_header_and_roundtrip() {
        let mut buf = Vec::new();
        write_csv(&rows(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("s,p,gamma,N,family,space,ratio,admissible\n"));
        assert!(text.contains("\"gaussian(c=2,w=1)\""));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows());
        let mut empty = Vec::new();
        write_csv(&[], &mut empty).unwrap();
        assert_eq!(
            String::from_utf8(empty).unwrap(),
            "s,p,gamma,N,family,space,ratio,admissible\n"
        );
    }

    #[test]
    fn json_matches_csv() {
        let mut j = Vec::new();
        write_json(&rows(), &mut j).unwrap();
        let mut c = Vec::new();
        write_csv(&rows(), &mut c).unwrap();
        assert_eq!(read_json(j.as_slice()).unwrap(), read_csv(c.as_slice()).unwrap());
        let v: serde_json::Value = serde_json::from_slice(&j).unwrap();
        assert_eq!(v[0]["N"], 256);
    }
}
