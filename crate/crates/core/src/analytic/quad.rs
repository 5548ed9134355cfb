//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

/// Tolerances for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_depth: u32) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::param("rel_tol", format!("{rel_tol} must be positive")));
        }
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::param("abs_tol", format!("{abs_tol} must be positive")));
        }
        if max_depth == 0 {
            return Err(Error::param("max_depth", "must be at least 1"));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_depth,
        })
    }

    /// Same depth, both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            max_depth: self.max_depth,
        }
    }
}

/// Number of equal panels the interval is cut into before adapting, so that
/// narrow features are not skipped by the first five-point estimate.
const INITIAL_PANELS: usize = 8;

/// Error left over on subintervals that hit `max_depth` without converging.
struct Budget {
    worst_excess: f64,
}

/// Integrates `f` over `[a, b]`. The integrand may fail; the first failure
/// aborts the integration.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param("bounds", format!("[{a}, {b}] must be finite")));
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let mut nodes = Vec::with_capacity(2 * INITIAL_PANELS + 1);
    for i in 0..=2 * INITIAL_PANELS {
        let x = if i == 2 * INITIAL_PANELS {
            b
        } else {
            a + 0.5 * h * i as f64
        };
        nodes.push((x, f(x)?));
    }
    let panels: Vec<_> = (0..INITIAL_PANELS)
        .map(|p| {
            let (x0, f0) = nodes[2 * p];
            let (_, fm) = nodes[2 * p + 1];
            let (x1, f1) = nodes[2 * p + 2];
            (x0, x1, f0, fm, f1, simpson(x1 - x0, f0, fm, f1))
        })
        .collect();
    let coarse: f64 = panels.iter().map(|p| p.5).sum();
    let tol = spec.abs_tol.max(spec.rel_tol * coarse.abs()) / INITIAL_PANELS as f64;

    let mut budget = Budget { worst_excess: 0.0 };
    let mut total = 0.0;
    for (x0, x1, f0, fm, f1, whole) in panels {
        total += refine(&mut f, x0, x1, f0, fm, f1, whole, tol, spec.max_depth, &mut budget)?;
    }
    if !total.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: total,
            error: f64::NAN,
        });
    }
    let allowed = spec.abs_tol.max(spec.rel_tol * total.abs());
    if budget.worst_excess > allowed {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: total,
            error: budget.worst_excess,
        });
    }
    Ok(total)
}

/// Infallible-integrand convenience wrapper around [`integrate`].
pub fn integrate_plain<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Ok(f(x)), a, b, spec)
}

/// Integrates over consecutive breakpoints `points[0] < points[1] < ...`.
pub fn integrate_pieces<F>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .try_fold(0.0, |acc, w| Ok(acc + integrate(&mut f, w[0], w[1], spec)?))
}

fn simpson(h: f64, f0: f64, fm: f64, f1: f64) -> f64 {
    h * (f0 + 4.0 * fm + f1) / 6.0
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut Budget,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = simpson(m - a, fa, flm, fm);
    let right = simpson(b - m, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || !delta.is_finite() {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        budget.worst_excess += (delta / 15.0).abs();
        return Ok(left + right + delta / 15.0);
    }
    // Tolerance is split between halves but never driven below what double
    // precision can resolve on the subinterval.
    let half_tol = (0.5 * tol).max(f64::EPSILON * (left.abs() + right.abs()));
    Ok(refine(f, a, m, fa, flm, fm, left, half_tol, depth - 1, budget)?
        + refine(f, m, b, fm, frm, fb, right, half_tol, depth - 1, budget)?)
}
