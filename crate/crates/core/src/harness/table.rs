//! Plot-ready CSV files.
//!
//! Curves use the columns `x,analytic,sim,sim_ci`; a missing estimate is an
//! empty field. Rate tables use one row per configuration. Numbers are
//! written with 9 significant digits.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CURVE_HEADER: [&str; 4] = ["x", "analytic", "sim", "sim_ci"];

pub const RATE_HEADER: [&str; 9] = [
    "config",
    "ul_edge",
    "ul_mean",
    "dl_edge",
    "dl_mean",
    "ul_edge_sim",
    "ul_mean_sim",
    "dl_edge_sim",
    "dl_mean_sim",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub x: f64,
    pub analytic: Option<f64>,
    pub sim: Option<f64>,
    pub sim_ci: Option<f64>,
}

impl CurveRow {
    pub fn new(x: f64) -> Self {
        Self {
            x,
            analytic: None,
            sim: None,
            sim_ci: None,
        }
    }
}

/// Cell-edge and mean rates of one configuration, per link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateCells {
    pub ul_edge: Option<f64>,
    pub ul_mean: Option<f64>,
    pub dl_edge: Option<f64>,
    pub dl_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub label: String,
    pub analytic: RateCells,
    pub sim: RateCells,
}

/// `%.9g`-style text: shortest of fixed and scientific notation without
/// trailing zeros, `.` as decimal point.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

fn csv_err(path: &str, reason: impl ToString) -> Error {
    Error::Csv {
        path: path.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_cell(path: &str, line: u64, column: &str, text: &str) -> Result<Option<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(None);
    }
    text.parse::<f64>()
        .map(Some)
        .map_err(|_| csv_err(path, format!("line {line}, column {column}: `{text}` is not a number")))
}

pub fn write_curve<W: Write>(out: W, rows: &[CurveRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER).map_err(|e| csv_err("<output>", e))?;
    for r in rows {
        w.write_record([format_sig9(r.x), cell(r.analytic), cell(r.sim), cell(r.sim_ci)])
            .map_err(|e| csv_err("<output>", e))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a curve; `path` only labels errors.
pub fn read_curve<R: Read>(input: R, path: &str) -> Result<Vec<CurveRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rd.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().map(str::trim).ne(CURVE_HEADER) {
        return Err(csv_err(path, format!("header must be `{}`", CURVE_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |i: usize| parse_cell(path, line, CURVE_HEADER[i], &rec[i]);
        let x = get(0)?.ok_or_else(|| csv_err(path, format!("line {line}: missing x")))?;
        rows.push(CurveRow {
            x,
            analytic: get(1)?,
            sim: get(2)?,
            sim_ci: get(3)?,
        });
    }
    if rows.is_empty() {
        return Err(csv_err(path, "no data rows"));
    }
    Ok(rows)
}

pub fn write_rate_table<W: Write>(out: W, rows: &[RateRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATE_HEADER).map_err(|e| csv_err("<output>", e))?;
    for r in rows {
        let (a, s) = (&r.analytic, &r.sim);
        w.write_record([
            r.label.clone(),
            cell(a.ul_edge),
            cell(a.ul_mean),
            cell(a.dl_edge),
            cell(a.dl_mean),
            cell(s.ul_edge),
            cell(s.ul_mean),
            cell(s.dl_edge),
            cell(s.dl_mean),
        ])
        .map_err(|e| csv_err("<output>", e))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rate_table<R: Read>(input: R, path: &str) -> Result<Vec<RateRow>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rd.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().map(str::trim).ne(RATE_HEADER) {
        return Err(csv_err(path, format!("header must be `{}`", RATE_HEADER.join(","))));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let get = |i: usize| parse_cell(path, line, RATE_HEADER[i], &rec[i]);
        rows.push(RateRow {
            label: rec[0].trim().to_string(),
            analytic: RateCells {
                ul_edge: get(1)?,
                ul_mean: get(2)?,
                dl_edge: get(3)?,
                dl_mean: get(4)?,
            },
            sim: RateCells {
                ul_edge: get(5)?,
                ul_mean: get(6)?,
                dl_edge: get(7)?,
                dl_mean: get(8)?,
            },
        });
    }
    Ok(rows)
}

pub fn write_curve_file(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let mut buf = Vec::new();
    write_curve(&mut buf, rows)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_curve_file(path: &Path) -> Result<Vec<CurveRow>> {
    let file = std::fs::File::open(path)?;
    read_curve(file, &path.display().to_string())
}
