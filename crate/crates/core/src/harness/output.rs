//! CSV and JSON emission. Both are pure functions of the result and the run
//! metadata; nothing about the host or the worker count ends up in the bytes.

use std::io::Write;

use serde::Serialize;

use super::config::HarnessConfig;
use super::sweep::{SweepResult, SweepRow};
use crate::error::{IsacError, Result};

/// Bumped whenever the CSV columns change.
pub const CSV_HEADER_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 11] = [
    "axis",
    "axis_value",
    "scheme",
    "status",
    "crb_rad2",
    "crb_db",
    "mse_rad2",
    "mse_db",
    "rate_bps",
    "radar_snr_db",
    "iterations",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub trials: usize,
    pub heavy: bool,
    pub csv_header_version: u32,
    pub config: HarnessConfig,
}

impl Meta {
    pub fn new(command: &str, cfg: &HarnessConfig, heavy: bool) -> Self {
        let (seed, trials) = cfg.sweep.as_ref().map_or((0, 0), |s| (s.seed, s.trials));
        Self {
            tool: "isac",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            trials,
            heavy,
            csv_header_version: CSV_HEADER_VERSION,
            config: cfg.clone(),
        }
    }
}

#[derive(Serialize)]
struct JsonDoc<'a, R: Serialize> {
    meta: &'a Meta,
    rows: &'a [R],
}

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

fn csv_record(axis: &str, r: &SweepRow) -> Vec<String> {
    vec![
        axis.to_string(),
        format!("{:e}", r.axis_value),
        r.scheme.clone(),
        r.status.as_str().to_string(),
        num(r.crb_rad2),
        num(r.crb_db),
        num(r.mse_rad2),
        num(r.mse_db),
        num(r.rate_bps),
        num(r.radar_snr_db),
        r.iterations.map(|i| i.to_string()).unwrap_or_default(),
    ]
}

fn csv_err(e: csv::Error) -> IsacError {
    IsacError::Io(std::io::Error::other(e))
}

pub fn write_sweep<W: Write>(out: W, res: &SweepResult, meta: &Meta, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_COLUMNS).map_err(csv_err)?;
            for r in &res.rows {
                w.write_record(csv_record(res.axis, r)).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(out, meta, &res.rows)?,
    }
    Ok(())
}

pub fn write_json<W: Write, R: Serialize>(mut out: W, meta: &Meta, rows: &[R]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &JsonDoc { meta, rows })
        .map_err(|e| IsacError::Io(std::io::Error::other(e)))?;
    out.write_all(b"\n")?;
    Ok(())
}
