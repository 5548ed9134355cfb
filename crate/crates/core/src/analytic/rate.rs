//! Rate distribution from a coverage function.
//!
//! With `k = 1` (half duplex) or `k = 2` (full duplex), the rate is
//! `C = k log2(1 + SINR)`, so `F_C(c) = 1 - P_c(2^(c/k) - 1)`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::radio::Duplex;

use super::quad::{integrate, QuadratureSpec};

/// Integration stops where the coverage falls below this level.
pub const TAIL_COVERAGE: f64 = 1e-6;

/// Percentile defining the cell-edge rate.
pub const CELL_EDGE_QUANTILE: f64 = 0.05;

/// Rates beyond this are treated as a non-decaying tail.
const MAX_RATE: f64 = 1e4;

/// Smallest rate resolved by the rate integrals and the edge-rate search.
const MIN_RATE: f64 = 1e-15;

/// SINR threshold `2^(c/k) - 1` for rate `c`.
pub fn rate_threshold(c: f64, duplex: Duplex) -> f64 {
    (c * LN_2 / duplex.rate_factor()).exp_m1()
}

/// `P[C <= c]`.
pub fn rate_cdf<F>(coverage: F, duplex: Duplex, c: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(c >= 0.0) {
        return Err(Error::param("rate", format!("{c} must be non-negative")));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - coverage(rate_threshold(c, duplex))?)
}

/// `E[C] = int_0^inf (1 - F_C(c)) dc`.
///
/// The integral runs to the first power of two where coverage drops below
/// [`TAIL_COVERAGE`]; beyond it the coverage is taken to decay like
/// `T^(-1/2)` (the `alpha = 4` interference law), which integrates to
/// `P_c(c_max) * 2k / ln 2`. Below `c_max` it is taken over `u = ln c`, where
/// `c (1 - F_C(c))` is a single smooth bump even when the rate distribution
/// spans many decades.
pub fn mean_rate<F>(coverage: F, duplex: Duplex, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let ccdf = |c: f64| coverage(rate_threshold(c, duplex));
    let mut c_max = 1.0;
    let mut tail_cov = ccdf(c_max)?;
    while tail_cov >= TAIL_COVERAGE {
        c_max *= 2.0;
        if c_max > MAX_RATE {
            return Err(Error::NonConvergentTail {
                threshold: TAIL_COVERAGE,
                c_max,
            });
        }
        tail_cov = ccdf(c_max)?;
    }
    let head = MIN_RATE * ccdf(MIN_RATE)?;
    let body = integrate(
        |u| {
            let c = u.exp();
            Ok(c * ccdf(c)?)
        },
        MIN_RATE.ln(),
        c_max.ln(),
        spec,
    )?;
    let tail = tail_cov * 2.0 * duplex.rate_factor() / LN_2;
    Ok(head + body + tail)
}

/// Rate at which `F_C` reaches [`CELL_EDGE_QUANTILE`], by bisection to
/// `1e-6` relative.
pub fn cell_edge_rate<F>(coverage: F, duplex: Duplex) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let cdf = |c: f64| rate_cdf(&coverage, duplex, c);
    let target = CELL_EDGE_QUANTILE;
    let floor = cdf(MIN_RATE)?;
    if floor > target {
        return Err(Error::DegenerateCdf(format!(
            "F_C({MIN_RATE:e}) = {floor} already exceeds {target}; edge rate is 0"
        )));
    }
    let mut hi = 1.0;
    while cdf(hi)? < target {
        hi *= 2.0;
        if hi > MAX_RATE {
            return Err(Error::DegenerateCdf(format!(
                "F_C stays below {target} up to {MAX_RATE} bps/Hz"
            )));
        }
    }
    let mut lo = MIN_RATE;
    for _ in 0..400 {
        if hi - lo <= 1e-6 * hi {
            break;
        }
        // geometric midpoint while the bracket spans decades
        let mid = if hi > 16.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if cdf(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (f_lo, f_hi) = (cdf(lo)?, cdf(hi)?);
    if f_hi - f_lo > 1e-2 {
        return Err(Error::DegenerateCdf(format!(
            "F_C jumps from {f_lo} to {f_hi} at c = {hi}"
        )));
    }
    Ok(0.5 * (lo + hi))
}
