//! Analytic coverage probabilities: half-duplex downlink, full-duplex downlink
//! with the same-cell uplink factor, and full-duplex uplink.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::serving_distance_pdf;
use crate::scenario::ScenarioParams;

use super::quad::{integrate, integrate_pieces, QuadratureSpec};
use super::same_cell::{same_cell_factor, SameCellMethod};

fn check_threshold(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::param("threshold", format!("{t} must be positive and finite")))
    }
}

/// `(2 pi^2 / alpha) csc(2 pi / alpha)`, the PPP interference constant.
pub fn interference_constant(alpha: f64) -> Result<f64> {
    let s = (2.0 * PI / alpha).sin();
    if !(alpha > 2.0 && s > 0.0) {
        return Err(Error::param("alpha", format!("{alpha} must exceed 2")));
    }
    Ok(2.0 * PI * PI / (alpha * s))
}

/// Exponent of the other-cell Laplace factor for a receiver at `r` from its
/// BS: `(2 pi^2 lambda T / alpha) csc(2 pi / alpha) r^alpha (r^-alpha / T)^((alpha-2)/alpha)`,
/// evaluated in the equivalent form `c(alpha) lambda r^2 T^(2/alpha)`.
pub fn other_cell_exponent(r: f64, t: f64, params: &ScenarioParams) -> Result<f64> {
    let alpha = params.alpha();
    Ok(interference_constant(alpha)? * params.lambda_bs() * r * r * t.powf(2.0 / alpha))
}

fn noise_exponent(r_d: f64, t: f64, params: &ScenarioParams) -> f64 {
    if params.sigma2() == 0.0 {
        0.0
    } else {
        t * r_d.powf(params.alpha()) * params.sigma2() / params.p_d()
    }
}

/// Downlink factor shared by the half- and full-duplex forms.
fn downlink_base(r_d: f64, t: f64, params: &ScenarioParams) -> Result<f64> {
    Ok((-noise_exponent(r_d, t, params) - other_cell_exponent(r_d, t, params)?).exp())
}

/// Half-duplex downlink coverage `P[SINR > t]`, `t` linear.
pub fn hd_dl_coverage(t: f64, params: &ScenarioParams, spec: &QuadratureSpec) -> Result<f64> {
    check_threshold(t)?;
    let r_c = params.r_c();
    let p = integrate(
        |r| Ok(downlink_base(r, t, params)? * serving_distance_pdf(r, r_c)),
        0.0,
        r_c,
        spec,
    )?;
    Ok(p.clamp(0.0, 1.0))
}

/// Full-duplex downlink coverage with the co-cell uplink user under
/// fractional power control, `t` linear.
pub fn fd_dl_coverage(
    t: f64,
    params: &ScenarioParams,
    spec: &QuadratureSpec,
    method: SameCellMethod,
) -> Result<f64> {
    check_threshold(t)?;
    let r_c = params.r_c();
    let inner_spec = spec.scaled(0.5);
    let p = integrate(
        |r_d| {
            let base = downlink_base(r_d, t, params)? * serving_distance_pdf(r_d, r_c);
            if base == 0.0 {
                return Ok(0.0);
            }
            // the factor dips sharply where the two users are equidistant
            let same_cell = integrate_pieces(
                |r_u| {
                    Ok(same_cell_factor(t, r_d, r_u, params, &inner_spec, method)?
                        * serving_distance_pdf(r_u, r_c))
                },
                &[0.0, r_d, r_c],
                &inner_spec,
            )?;
            Ok(base * same_cell)
        },
        0.0,
        r_c,
        spec,
    )?;
    Ok(p.clamp(0.0, 1.0))
}

/// Full-duplex uplink coverage with fractional power control, neglecting
/// other-cell uplink users, `t` linear.
pub fn fd_ul_coverage(t: f64, params: &ScenarioParams, spec: &QuadratureSpec) -> Result<f64> {
    check_threshold(t)?;
    let (alpha, eps) = (params.alpha(), params.epsilon());
    let (p_0, p_d) = (params.p_0(), params.p_d());
    let r_c = params.r_c();
    let constant = interference_constant(alpha)? * params.lambda_bs();
    let integrand = |r_u: f64| -> Result<f64> {
        let noise = if params.sigma2() == 0.0 {
            0.0
        } else {
            params.sigma2() * t * r_u.powf(alpha * (1.0 - eps)) / p_0
        };
        // (P_0 r^(alpha(eps-1)) / (T P_d))^(-2/alpha)
        let obi = constant * (t * p_d / p_0).powf(2.0 / alpha) * r_u.powf(2.0 * (1.0 - eps));
        Ok((-noise - obi).exp() * serving_distance_pdf(r_u, r_c))
    };
    Ok(integrate(integrand, 0.0, r_c, spec)?.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::from_db;

    fn base() -> ScenarioParams {
        ScenarioParams::from_inter_bs_distance(400.0).unwrap()
    }

    #[test]
    fn interference_constant_at_alpha_four() {
        assert!((interference_constant(4.0).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!(interference_constant(2.0).is_err());
        assert!(interference_constant(1.5).is_err());
    }

    #[test]
    fn literal_exponent_matches_simplified_form() {
        let p = base();
        for &r in &[1e-3f64, 0.5, 17.0, 199.9] {
            for &t in &[1e-6f64, 0.3, 1.0, 1e4] {
                let a = p.alpha();
                let literal = 2.0 * PI * PI * p.lambda_bs() * t / (2.0 * PI / a).sin()
                    * r.powf(a)
                    * (r.powf(-a) / t).powf((a - 2.0) / a)
                    / a;
                let simplified = PI * PI / 2.0 * p.lambda_bs() * r * r * t.sqrt();
                let ours = other_cell_exponent(r, t, &p).unwrap();
                assert!((literal / simplified - 1.0).abs() < 1e-12);
                assert!((ours / simplified - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hd_matches_closed_form_for_alpha_four() {
        let spec = QuadratureSpec::default();
        for &(d, t_db) in &[(400.0, 0.0), (400.0, 10.0), (900.0, -7.0)] {
            let p = ScenarioParams::from_inter_bs_distance(d).unwrap();
            let t = from_db(t_db);
            let c = PI * PI / 2.0 * p.lambda_bs() * p.r_c().powi(2) * t.sqrt();
            let exact = (1.0 - (-c).exp()) / c;
            let got = hd_dl_coverage(t, &p, &spec).unwrap();
            assert!((got / exact - 1.0).abs() < spec.rel_tol, "{got} vs {exact}");
        }
    }

    #[test]
    fn fd_dl_without_uplink_power_is_hd() {
        let spec = QuadratureSpec::default();
        let p = base().to_builder().p_0_linear(0.0).build().unwrap();
        for &t in &[0.01, 1.0, 50.0] {
            let hd = hd_dl_coverage(t, &p, &spec).unwrap();
            let fd = fd_dl_coverage(t, &p, &spec, SameCellMethod::Oracle).unwrap();
            assert!((hd - fd).abs() < 1e-9);
        }
    }

    #[test]
    fn ul_tends_to_one_at_vanishing_threshold() {
        let p = base().to_builder().epsilon(0.8).build().unwrap();
        let v = fd_ul_coverage(1e-20, &p, &QuadratureSpec::default()).unwrap();
        assert!(v > 0.999_99);
    }

    #[test]
    fn noise_lowers_coverage() {
        let spec = QuadratureSpec::default();
        let quiet = base();
        let noisy = base().to_builder().sigma2(1e-6).build().unwrap();
        assert!(hd_dl_coverage(1.0, &noisy, &spec).unwrap() < hd_dl_coverage(1.0, &quiet, &spec).unwrap());
        assert!(fd_ul_coverage(1e-3, &noisy, &spec).unwrap() < fd_ul_coverage(1e-3, &quiet, &spec).unwrap());
    }

    #[test]
    fn rejects_non_positive_thresholds() {
        let spec = QuadratureSpec::default();
        assert!(hd_dl_coverage(0.0, &base(), &spec).is_err());
        assert!(fd_ul_coverage(-1.0, &base(), &spec).is_err());
        assert!(fd_dl_coverage(f64::NAN, &base(), &spec, SameCellMethod::Oracle).is_err());
    }
}
