//! Trajectory serialization.
//!
//! Both formats carry the columns
//! `t,rx,ry,rz,px,py,pz,sx,sy,sz,h0,so,h1,h2,dv,zeeman,total`. Numbers are
//! written as shortest round-trip decimals, so reading a file back yields
//! bit-identical values.

use std::io::{self, Write};

use serde::Serialize;

use crate::dynamics::{TrajectoryRecord, TrajectorySample};

pub const CSV_HEADER: &str = "t,rx,ry,rz,px,py,pz,sx,sy,sz,h0,so,h1,h2,dv,zeeman,total";
pub const COLUMNS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("trajectory record is empty")]
    EmptyRecord,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn row(s: &TrajectorySample) -> [f64; COLUMNS] {
    let b = &s.terms;
    [
        s.t, s.r.x, s.r.y, s.r.z, s.p.x, s.p.y, s.p.z, s.sigma.x, s.sigma.y, s.sigma.z, b.h0,
        b.so, b.h1, b.h2, b.dv, b.zeeman, b.total,
    ]
}

#[derive(Serialize)]
struct JsonRow {
    t: f64,
    rx: f64,
    ry: f64,
    rz: f64,
    px: f64,
    py: f64,
    pz: f64,
    sx: f64,
    sy: f64,
    sz: f64,
    h0: f64,
    so: f64,
    h1: f64,
    h2: f64,
    dv: f64,
    zeeman: f64,
    total: f64,
}

impl From<&TrajectorySample> for JsonRow {
    fn from(s: &TrajectorySample) -> Self {
        let [t, rx, ry, rz, px, py, pz, sx, sy, sz, h0, so, h1, h2, dv, zeeman, total] = row(s);
        JsonRow {
            t,
            rx,
            ry,
            rz,
            px,
            py,
            pz,
            sx,
            sy,
            sz,
            h0,
            so,
            h1,
            h2,
            dv,
            zeeman,
            total,
        }
    }
}

pub fn write_trajectory<W: Write>(rec: &TrajectoryRecord, fmt: Format, mut out: W) -> Result<(), OutputError> {
    if rec.samples.is_empty() {
        return Err(OutputError::EmptyRecord);
    }
    match fmt {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for s in &rec.samples {
                let fields: Vec<String> = row(s).iter().map(|v| format!("{v:?}")).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Format::Jsonl => {
            for s in &rec.samples {
                serde_json::to_writer(&mut out, &JsonRow::from(s)).map_err(io::Error::from)?;
                writeln!(out)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn trajectory_bytes(rec: &TrajectoryRecord, fmt: Format) -> Result<Vec<u8>, OutputError> {
    let mut buf = Vec::new();
    write_trajectory(rec, fmt, &mut buf)?;
    Ok(buf)
}

/// Reads CSV written by [`write_trajectory`] into raw rows.
pub fn read_trajectory_csv(text: &str) -> Result<Vec<[f64; COLUMNS]>, OutputError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(CSV_HEADER) => {}
        _ => {
            return Err(OutputError::Malformed {
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let mut out = [0.0; COLUMNS];
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMNS {
            return Err(OutputError::Malformed {
                line: lineno,
                message: format!("expected {COLUMNS} fields, found {}", fields.len()),
            });
        }
        for (o, f) in out.iter_mut().zip(fields) {
            *o = f.parse().map_err(|_| OutputError::Malformed {
                line: lineno,
                message: format!("'{f}' is not a number"),
            })?;
        }
        rows.push(out);
    }
    Ok(rows)
}

/// Row values of a sample in column order.
pub fn sample_row(s: &TrajectorySample) -> [f64; COLUMNS] {
    row(s)
}
