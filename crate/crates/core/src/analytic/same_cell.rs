//! Averaging the co-cell uplink interference factor over the angle between
//! the two users of a cell.
//!
//! Conditioned on the downlink user at `r_d` and the uplink user at `r_u`,
//! the same-cell factor is
//!
//! ```text
//! T0(gamma) = 1 / (1 + P_0 r_u^(alpha eps) T r_d^alpha / (P_d d(gamma)^alpha))
//! ```
//!
//! with `d` the law-of-cosines distance and `gamma ~ U[-pi, pi]`. Two routes
//! evaluate `E_gamma[T0]`:
//!
//! * [`same_cell_factor_closed`]: the second-order series closed form built on
//!   `zeta`. With `zeta < 0` it is evaluated through
//!   `sqrt(2 zeta) atan(pi sqrt(zeta / 2)) = -sqrt(2|zeta|) artanh(pi sqrt(|zeta| / 2))`,
//!   which is real only while `pi sqrt(|zeta| / 2) < 1`.
//! * [`same_cell_factor_oracle`]: the exact average, in closed form for
//!   `alpha = 4` and by adaptive quadrature otherwise.
//!
//! The series error grows roughly like `y^2 / 2` in `y = pi sqrt(|zeta| / 2)`;
//! [`CLOSED_FORM_MAX_ARG`] bounds the region where the closed form is used.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::geometry::pair_distance_sq;
use crate::scenario::ScenarioParams;

use super::quad::{integrate_plain, QuadratureSpec};

/// Largest `pi sqrt(|zeta| / 2)` at which the closed form is trusted. Within it
/// the closed form stays within 1.4% of the exact angular average.
pub const CLOSED_FORM_MAX_ARG: f64 = 0.2;

/// How [`fd_dl_coverage`](super::fd_dl_coverage) averages the same-cell
/// factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SameCellMethod {
    /// Closed form where trusted, quadrature elsewhere.
    #[default]
    ClosedWithFallback,
    /// Quadrature everywhere.
    Oracle,
}

impl SameCellMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SameCellMethod::ClosedWithFallback => "closed",
            SameCellMethod::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for SameCellMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SameCellMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "closed" => Ok(SameCellMethod::ClosedWithFallback),
            "oracle" => Ok(SameCellMethod::Oracle),
            other => Err(format!("unknown same-cell method `{other}` (expected closed or oracle)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaTerm {
    pub zeta: f64,
    /// The closed form is real-evaluable at this `zeta`.
    pub valid: bool,
}

impl ZetaTerm {
    /// `pi sqrt(|zeta| / 2)`, the artanh argument.
    pub fn artanh_arg(&self) -> f64 {
        PI * (0.5 * self.zeta.abs()).sqrt()
    }

    /// Real-evaluable and inside [`CLOSED_FORM_MAX_ARG`].
    pub fn trusted(&self) -> bool {
        self.valid && self.artanh_arg() <= CLOSED_FORM_MAX_ARG
    }
}

/// `(r_d - r_u)^2 r_u^(-2 eps) / r_d^2`
fn separation_ratio(r_d: f64, r_u: f64, eps: f64) -> f64 {
    (r_d - r_u).powi(2) * r_u.powf(-2.0 * eps) / (r_d * r_d)
}

pub fn zeta(t: f64, r_d: f64, r_u: f64, params: &ScenarioParams) -> ZetaTerm {
    let (alpha, p_0, p_d) = (params.alpha(), params.p_0(), params.p_d());
    if r_d == r_u || p_d <= 0.0 {
        return ZetaTerm {
            zeta: f64::NEG_INFINITY,
            valid: false,
        };
    }
    let q = separation_ratio(r_d, r_u, params.epsilon());
    let zeta = -(alpha * p_0 * t * r_d * r_u)
        / ((r_d - r_u).powi(2) * (p_d * q.powf(alpha / 2.0) + p_0 * t));
    let term = ZetaTerm { zeta, valid: true };
    ZetaTerm {
        zeta,
        valid: zeta.is_finite() && zeta <= 0.0 && term.artanh_arg() < 1.0,
    }
}

/// Closed-form angular average, or `None` where it is not real-evaluable
/// (including `r_d == r_u`). Values are capped at 1.
///
/// Evaluated as `base * artanh(y) / y`, where `base = 1 / (1 + P_0 T /
/// (P_d q^(alpha/2)))` collects the remaining factors of the closed form
/// algebraically; this keeps the `r_u -> 0` and `zeta -> 0` limits finite.
pub fn same_cell_factor_closed(t: f64, r_d: f64, r_u: f64, params: &ScenarioParams) -> Option<f64> {
    if params.p_0() == 0.0 {
        return Some(1.0);
    }
    let term = zeta(t, r_d, r_u, params);
    if !term.valid {
        return None;
    }
    let q = separation_ratio(r_d, r_u, params.epsilon());
    let base = 1.0 / (1.0 + params.p_0() * t / (params.p_d() * q.powf(params.alpha() / 2.0)));
    let y = term.artanh_arg();
    let series = if y < 1e-6 { 1.0 + y * y / 3.0 } else { y.atanh() / y };
    let value = base * series;
    value.is_finite().then(|| value.min(1.0))
}

/// Coupling `K = P_0 r_u^(alpha eps) T r_d^alpha / P_d` in `T0 = 1 / (1 + K / d^alpha)`.
/// Uses the uncapped power-control law.
fn coupling(t: f64, r_d: f64, r_u: f64, params: &ScenarioParams) -> f64 {
    let alpha = params.alpha();
    let exponent = alpha * params.epsilon();
    let p_u = if exponent == 0.0 {
        params.p_0()
    } else {
        params.p_0() * r_u.powf(exponent)
    };
    p_u * t * r_d.powf(alpha) / params.p_d()
}

/// `T0` at angle `gamma`.
pub fn same_cell_integrand(t: f64, r_d: f64, r_u: f64, gamma: f64, params: &ScenarioParams) -> f64 {
    let k = coupling(t, r_d, r_u, params);
    if k == 0.0 {
        return 1.0;
    }
    let d_alpha = pair_distance_sq(r_d, r_u, gamma).powf(params.alpha() / 2.0);
    d_alpha / (d_alpha + k)
}

/// Angular average by adaptive quadrature (integrand even in `gamma`).
pub fn same_cell_factor_quadrature(
    t: f64,
    r_d: f64,
    r_u: f64,
    params: &ScenarioParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if coupling(t, r_d, r_u, params) == 0.0 {
        return Ok(1.0);
    }
    let half = integrate_plain(|g| same_cell_integrand(t, r_d, r_u, g, params), 0.0, PI, spec)?;
    Ok((half / PI).clamp(0.0, 1.0))
}

/// Exact angular average for `alpha = 4`.
///
/// With `d^2 = A - B cos(gamma)` and `K = kappa^2`,
/// `1 / (d^4 + K) = Im[1 / (d^2 - i kappa)] / kappa`, and the average of
/// `1 / (a - B cos(gamma))` is `1 / (sqrt(a - B) sqrt(a + B))` (principal
/// roots). `A -+ B` are formed as `(r_d -+ r_u)^2` to avoid cancellation.
pub fn same_cell_factor_alpha4(t: f64, r_d: f64, r_u: f64, params: &ScenarioParams) -> f64 {
    let k = coupling(t, r_d, r_u, params);
    if k == 0.0 {
        return 1.0;
    }
    let kappa = k.sqrt();
    let near = Complex64::new((r_d - r_u).powi(2), -kappa);
    let far = Complex64::new((r_d + r_u).powi(2), -kappa);
    let mean_inv = (near.sqrt() * far.sqrt()).inv();
    (1.0 - kappa * mean_inv.im).clamp(0.0, 1.0)
}

/// Exact angular average: closed in `alpha = 4`, adaptive quadrature for
/// other exponents.
pub fn same_cell_factor_oracle(
    t: f64,
    r_d: f64,
    r_u: f64,
    params: &ScenarioParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if params.alpha() == 4.0 {
        Ok(same_cell_factor_alpha4(t, r_d, r_u, params))
    } else {
        same_cell_factor_quadrature(t, r_d, r_u, params, spec)
    }
}

/// Angular average by the chosen method.
pub fn same_cell_factor(
    t: f64,
    r_d: f64,
    r_u: f64,
    params: &ScenarioParams,
    spec: &QuadratureSpec,
    method: SameCellMethod,
) -> Result<f64> {
    if method == SameCellMethod::ClosedWithFallback && zeta(t, r_d, r_u, params).trusted() {
        if let Some(v) = same_cell_factor_closed(t, r_d, r_u, params) {
            return Ok(v);
        }
    }
    same_cell_factor_oracle(t, r_d, r_u, params, spec)
}
