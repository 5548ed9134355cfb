//! Closed-form and quadrature evaluation of coverage, inverse-SINR moments
//! and rate statistics.

pub mod coverage;
pub mod moments;
pub mod quad;
pub mod rate;
pub mod same_cell;

pub use coverage::{fd_dl_coverage, fd_ul_coverage, hd_dl_coverage, other_cell_exponent};
pub use moments::{mean_inverse_sinr_dl, mean_inverse_sinr_ul, InverseSinr};
pub use quad::QuadratureSpec;
pub use rate::{cell_edge_rate, mean_rate, rate_cdf};
pub use same_cell::{
    same_cell_factor, same_cell_factor_alpha4, same_cell_factor_closed, same_cell_factor_oracle,
    same_cell_factor_quadrature, zeta, SameCellMethod,
    ZetaTerm,
};

use crate::error::{Error, Result};
use crate::radio::{Duplex, Link};
use crate::scenario::ScenarioParams;

/// Analytic coverage at linear threshold `t` for a link and duplex mode.
///
/// Half-duplex uplink has no analytic form here and is rejected.
pub fn coverage(
    link: Link,
    duplex: Duplex,
    t: f64,
    params: &ScenarioParams,
    spec: &QuadratureSpec,
    method: SameCellMethod,
) -> Result<f64> {
    match (link, duplex) {
        (Link::Dl, Duplex::Hd) => hd_dl_coverage(t, params, spec),
        (Link::Dl, Duplex::Fd) => fd_dl_coverage(t, params, spec, method),
        (Link::Ul, Duplex::Fd) => fd_ul_coverage(t, params, spec),
        (Link::Ul, Duplex::Hd) => Err(Error::param(
            "duplex",
            "no analytic half-duplex uplink coverage; use the simulator",
        )),
    }
}

/// Mean and 5% rate from the analytic coverage of one configuration.
pub fn rate_profile(
    link: Link,
    duplex: Duplex,
    params: &ScenarioParams,
    spec: &QuadratureSpec,
    method: SameCellMethod,
) -> Result<(f64, f64)> {
    let cov = |t: f64| coverage(link, duplex, t, params, spec, method);
    let mean = mean_rate(cov, duplex, spec)?;
    let edge = cell_edge_rate(cov, duplex)?;
    Ok((mean, edge))
}
