//! Closed-form averages of the inverse SINR under channel inversion and
//! regularised path loss.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{to_db, ScenarioParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseSinr {
    pub linear: f64,
    pub db: f64,
}

impl InverseSinr {
    fn new(linear: f64) -> Self {
        Self {
            linear,
            db: to_db(linear),
        }
    }
}

/// `alpha^2 - 3 alpha + 2`, positive exactly when `alpha > 2`.
fn shape(alpha: f64) -> Result<f64> {
    let q = alpha * alpha - 3.0 * alpha + 2.0;
    if alpha > 2.0 && q > 0.0 {
        Ok(q)
    } else {
        Err(Error::param("alpha", format!("{alpha} must exceed 2")))
    }
}

/// Uplink:
/// `(1/P_0) (2 R^(alpha(1-eps)) / (alpha(1-eps) + 2)) (sigma^2 + 2 pi lambda P_d / (alpha^2 - 3 alpha + 2))`
/// with `R` the cluster radius.
pub fn mean_inverse_sinr_ul(params: &ScenarioParams) -> Result<InverseSinr> {
    let (alpha, eps) = (params.alpha(), params.epsilon());
    let q = shape(alpha)?;
    if params.p_0() <= 0.0 {
        return Err(Error::param("p_0", "uplink inverse SINR needs positive P_0"));
    }
    let r = params.r_c();
    let spread = alpha * (1.0 - eps);
    let distance_term = 2.0 * r.powf(spread) / (spread + 2.0);
    let interference = params.sigma2() + 2.0 * PI * params.lambda_bs() * params.p_d() / q;
    Ok(InverseSinr::new(distance_term * interference / params.p_0()))
}

/// Downlink:
/// `(2 R^alpha / (alpha + 2)) (sigma^2 / P_d + 2 pi lambda / (alpha^2 - 3 alpha + 2))
///  + P_0 R^(alpha eps + 2) (2 alpha - 1) / (P_d (alpha - 1) (alpha eps + 2))`.
pub fn mean_inverse_sinr_dl(params: &ScenarioParams) -> Result<InverseSinr> {
    let (alpha, eps) = (params.alpha(), params.epsilon());
    let q = shape(alpha)?;
    if params.p_d() <= 0.0 {
        return Err(Error::param("p_d", "downlink inverse SINR needs positive P_d"));
    }
    let r = params.r_c();
    let other_cell = 2.0 * r.powf(alpha) / (alpha + 2.0)
        * (params.sigma2() / params.p_d() + 2.0 * PI * params.lambda_bs() / q);
    let same_cell = params.p_0() * r.powf(alpha * eps + 2.0) * (2.0 * alpha - 1.0)
        / (params.p_d() * (alpha - 1.0) * (alpha * eps + 2.0));
    Ok(InverseSinr::new(other_cell + same_cell))
}
