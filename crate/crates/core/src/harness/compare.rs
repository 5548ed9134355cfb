//! Point-by-point comparison of two curves on a shared grid.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::table::{read_curve_file, CurveRow};
use crate::error::{Error, Result};

/// Grid points closer than this (relative to `max(1, |x|)`) are the same.
const GRID_TOL: f64 = 1e-9;

/// Which column of a curve file is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Column {
    Analytic,
    Sim,
    /// `analytic` when every row has it, otherwise `sim`.
    Auto,
}

impl FromStr for Column {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "analytic" => Ok(Column::Analytic),
            "sim" => Ok(Column::Sim),
            "auto" => Ok(Column::Auto),
            other => Err(format!("unknown column `{other}` (expected analytic, sim or auto)")),
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Column::Analytic => "analytic",
            Column::Sim => "sim",
            Column::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointDeviation {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub abs_dev: f64,
    /// Relative to `|b|`; infinite when `b` is zero and `a` is not.
    pub rel_dev: f64,
    pub within_tol: bool,
    /// Whether the two 95% intervals overlap; only for sim-vs-sim points
    /// where both sides carry an interval.
    pub ci_overlap: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub column_a: Column,
    pub column_b: Column,
    pub tol: f64,
    pub points: Vec<PointDeviation>,
    pub max_abs_dev: f64,
    pub max_rel_dev: f64,
    pub pass: bool,
}

fn resolve(rows: &[CurveRow], column: Column, label: &str) -> Result<Column> {
    let all = |f: fn(&CurveRow) -> Option<f64>| rows.iter().all(|r| f(r).is_some());
    let has = match column {
        Column::Analytic => all(|r| r.analytic),
        Column::Sim => all(|r| r.sim),
        Column::Auto => {
            return if all(|r| r.analytic) {
                Ok(Column::Analytic)
            } else if all(|r| r.sim) {
                Ok(Column::Sim)
            } else {
                Err(Error::Csv {
                    path: label.to_string(),
                    reason: "neither the analytic nor the sim column is complete".into(),
                })
            };
        }
    };
    if has {
        Ok(column)
    } else {
        Err(Error::Csv {
            path: label.to_string(),
            reason: format!("column `{column}` has empty fields"),
        })
    }
}

fn value(r: &CurveRow, column: Column) -> (f64, Option<f64>) {
    match column {
        Column::Analytic => (r.analytic.expect("checked"), None),
        _ => (r.sim.expect("checked"), r.sim_ci),
    }
}

/// Compares `a` against reference `b`. The grids must match exactly (up to
/// rounding); curves are never resampled.
pub fn compare_curves(
    a: &[CurveRow],
    b: &[CurveRow],
    column_a: Column,
    column_b: Column,
    tol: f64,
) -> Result<ComparisonReport> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::param("tol", format!("{tol} must be a non-negative number")));
    }
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} points against {}", a.len(), b.len())));
    }
    for (ra, rb) in a.iter().zip(b) {
        if (ra.x - rb.x).abs() > GRID_TOL * ra.x.abs().max(1.0) {
            return Err(Error::GridMismatch(format!("x = {} against x = {}", ra.x, rb.x)));
        }
    }
    let column_a = resolve(a, column_a, "first curve")?;
    let column_b = resolve(b, column_b, "second curve")?;
    let points: Vec<PointDeviation> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| {
            let (va, ca) = value(ra, column_a);
            let (vb, cb) = value(rb, column_b);
            let abs_dev = (va - vb).abs();
            let rel_dev = if vb != 0.0 {
                abs_dev / vb.abs()
            } else if abs_dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            let ci_overlap = match (ca, cb) {
                (Some(ca), Some(cb)) => Some(abs_dev <= ca + cb),
                _ => None,
            };
            let within_tol = abs_dev <= tol;
            PointDeviation {
                x: ra.x,
                a: va,
                b: vb,
                abs_dev,
                rel_dev,
                within_tol,
                ci_overlap,
                pass: within_tol || ci_overlap == Some(true),
            }
        })
        .collect();
    let max_abs_dev = points.iter().map(|p| p.abs_dev).fold(0.0, f64::max);
    let max_rel_dev = points.iter().map(|p| p.rel_dev).fold(0.0, f64::max);
    let pass = points.iter().all(|p| p.pass);
    Ok(ComparisonReport {
        column_a,
        column_b,
        tol,
        points,
        max_abs_dev,
        max_rel_dev,
        pass,
    })
}

pub fn compare_files(a: &Path, b: &Path, column_a: Column, column_b: Column, tol: f64) -> Result<ComparisonReport> {
    compare_curves(&read_curve_file(a)?, &read_curve_file(b)?, column_a, column_b, tol)
}
