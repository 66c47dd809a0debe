//! CSV curves: reflection sweeps and flux tuning curves.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so the
//! reader recovers every value bit for bit.

use std::io::{Read, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::ac::{AcError, FrequencyResponse};

pub const RESPONSE_HEADER: &str = "freq_hz,re_gamma,im_gamma,gain_db";
pub const FLUX_HEADER: &str = "phi_over_phi0,f_bare_hz";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected CSV header {found:?}, expected {expected:?}")]
    Header { found: String, expected: &'static str },
    #[error("row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error(transparent)]
    Response(#[from] AcError),
}

pub fn write_response_csv<W: Write>(resp: &FrequencyResponse, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{RESPONSE_HEADER}")?;
    for ((f, g), db) in resp.freqs().iter().zip(resp.gamma()).zip(resp.gain_db()) {
        writeln!(out, "{},{},{},{}", f, g.re, g.im, db)?;
    }
    out.flush()
}

pub fn write_flux_csv<W: Write>(curve: &[(f64, f64)], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{FLUX_HEADER}")?;
    for (phi, f) in curve {
        writeln!(out, "{phi},{f}")?;
    }
    out.flush()
}

fn read_rows<R: Read>(input: R, expected: &'static str) -> Result<Vec<Vec<f64>>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != expected {
        return Err(CsvError::Header {
            found: header,
            expected,
        });
    }
    let width = expected.split(',').count();
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != width {
            return Err(CsvError::Row {
                row: i + 1,
                reason: format!("expected {width} fields, got {}", record.len()),
            });
        }
        let values = record
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|e| CsvError::Row {
                    row: i + 1,
                    reason: format!("{s:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    Ok(rows)
}

/// Reads a sweep written by [`write_response_csv`]. Rows with infinite gain
/// come back as pole markers.
pub fn read_response_csv<R: Read>(input: R) -> Result<FrequencyResponse, CsvError> {
    let rows = read_rows(input, RESPONSE_HEADER)?;
    let freqs = rows.iter().map(|r| r[0]).collect();
    let gamma = rows
        .iter()
        .map(|r| r[3].is_finite().then(|| Complex64::new(r[1], r[2])))
        .collect();
    Ok(FrequencyResponse::new(freqs, gamma)?)
}

pub fn read_flux_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>, CsvError> {
    Ok(read_rows(input, FLUX_HEADER)?
        .into_iter()
        .map(|r| (r[0], r[1]))
        .collect())
}
