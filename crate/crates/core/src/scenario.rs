//! Model parameters and power-unit conventions.
//!
//! Every other module consumes a validated [`ScenarioParams`]. Powers are held
//! as linear values in a common internal unit (mW); the [`PowerUnitConvention`]
//! records how dBm inputs were mapped onto that scale so that the same nominal
//! "-64 dBm" can be read either as milliwatts or as watts.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit in which a nominal dBm figure is interpreted before entering the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PowerUnit {
    #[default]
    Milliwatt,
    Watt,
}

impl PowerUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerUnit::Milliwatt => "milliwatt",
            PowerUnit::Watt => "watt",
        }
    }
}

impl fmt::Display for PowerUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PowerUnit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mw" | "milliwatt" => Ok(PowerUnit::Milliwatt),
            "w" | "watt" => Ok(PowerUnit::Watt),
            other => Err(format!("unknown power unit `{other}` (expected mw or w)")),
        }
    }
}

/// Per-quantity unit override for the power-control baseline and the BS power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PowerUnitConvention {
    pub p0_unit: PowerUnit,
    pub p_d_unit: PowerUnit,
}

impl PowerUnitConvention {
    /// Both quantities in milliwatts.
    pub const MILLIWATT: Self = Self {
        p0_unit: PowerUnit::Milliwatt,
        p_d_unit: PowerUnit::Milliwatt,
    };

    /// Baseline read in watts, BS power in milliwatts.
    pub const P0_WATT: Self = Self {
        p0_unit: PowerUnit::Watt,
        p_d_unit: PowerUnit::Milliwatt,
    };
}

/// `x` dBm as a linear power in `unit`.
pub fn dbm_to_linear(x: f64, unit: PowerUnit) -> f64 {
    match unit {
        PowerUnit::Milliwatt => 10f64.powf(x / 10.0),
        PowerUnit::Watt => 10f64.powf((x - 30.0) / 10.0),
    }
}

/// Inverse of [`dbm_to_linear`].
pub fn linear_to_dbm(p: f64, unit: PowerUnit) -> f64 {
    match unit {
        PowerUnit::Milliwatt => 10.0 * p.log10(),
        PowerUnit::Watt => 10.0 * p.log10() + 30.0,
    }
}

/// Plain ratio to decibels.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Decibels to a plain ratio.
pub fn from_db(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Density that places, on average, one BS per disk of radius `r_c`.
pub fn density_for_radius(r_c: f64) -> f64 {
    1.0 / (PI * r_c * r_c)
}

/// Validated physical and model parameters.
///
/// Fields are read through accessors; construction always goes through
/// [`ScenarioBuilder::build`] (or deserialization, which validates too).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ScenarioParams {
    alpha: f64,
    lambda_bs: f64,
    r_c: f64,
    p_d: f64,
    p_0: f64,
    p_max_u: f64,
    epsilon: f64,
    sigma2: f64,
    window_len: f64,
    units: PowerUnitConvention,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawParams {
    alpha: f64,
    lambda_bs: f64,
    r_c: f64,
    p_d: f64,
    p_0: f64,
    p_max_u: f64,
    epsilon: f64,
    sigma2: f64,
    window_len: f64,
    p0_unit: PowerUnit,
    p_d_unit: PowerUnit,
}

impl TryFrom<RawParams> for ScenarioParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let params = ScenarioParams {
            alpha: raw.alpha,
            lambda_bs: raw.lambda_bs,
            r_c: raw.r_c,
            p_d: raw.p_d,
            p_0: raw.p_0,
            p_max_u: raw.p_max_u,
            epsilon: raw.epsilon,
            sigma2: raw.sigma2,
            window_len: raw.window_len,
            units: PowerUnitConvention {
                p0_unit: raw.p0_unit,
                p_d_unit: raw.p_d_unit,
            },
        };
        params.validate()?;
        Ok(params)
    }
}

impl From<ScenarioParams> for RawParams {
    fn from(p: ScenarioParams) -> Self {
        RawParams {
            alpha: p.alpha,
            lambda_bs: p.lambda_bs,
            r_c: p.r_c,
            p_d: p.p_d,
            p_0: p.p_0,
            p_max_u: p.p_max_u,
            epsilon: p.epsilon,
            sigma2: p.sigma2,
            window_len: p.window_len,
            p0_unit: p.units.p0_unit,
            p_d_unit: p.units.p_d_unit,
        }
    }
}

impl ScenarioParams {
    pub fn builder() -> ScenarioBuilder {
        ScenarioBuilder::default()
    }

    /// Cell radius half the inter-BS distance, density `1/(pi r_c^2)`, every
    /// other field at its default.
    pub fn from_inter_bs_distance(d_bs: f64) -> Result<Self> {
        ScenarioBuilder::default().inter_bs_distance(d_bs).build()
    }

    /// Path-loss exponent.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// BS density in 1/m^2.
    pub fn lambda_bs(&self) -> f64 {
        self.lambda_bs
    }
    /// Cluster (cell) radius in m.
    pub fn r_c(&self) -> f64 {
        self.r_c
    }
    /// Downlink transmit power, linear.
    pub fn p_d(&self) -> f64 {
        self.p_d
    }
    /// Power-control baseline, linear.
    pub fn p_0(&self) -> f64 {
        self.p_0
    }
    /// Uplink power ceiling, linear.
    pub fn p_max_u(&self) -> f64 {
        self.p_max_u
    }
    /// Fractional power-control factor.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    /// Noise power, linear.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }
    /// Side of the square simulation window in m.
    pub fn window_len(&self) -> f64 {
        self.window_len
    }
    pub fn units(&self) -> PowerUnitConvention {
        self.units
    }

    /// Serving distance beyond which uplink power clips at the ceiling.
    /// Infinite when `epsilon == 0` and the baseline is below the ceiling.
    pub fn saturation_distance(&self) -> f64 {
        if self.p_0 >= self.p_max_u {
            return 0.0;
        }
        if self.epsilon == 0.0 || self.p_0 == 0.0 {
            return f64::INFINITY;
        }
        (self.p_max_u / self.p_0).powf(1.0 / (self.alpha * self.epsilon))
    }

    pub fn to_builder(&self) -> ScenarioBuilder {
        ScenarioBuilder {
            alpha: self.alpha,
            lambda_bs: Some(self.lambda_bs),
            r_c: self.r_c,
            p_d: PowerSetting::Linear(self.p_d),
            p_0: PowerSetting::Linear(self.p_0),
            p_max_u: PowerSetting::Linear(self.p_max_u),
            epsilon: self.epsilon,
            sigma2: self.sigma2,
            window_len: self.window_len,
            units: self.units,
            d_bs: None,
        }
    }

    fn validate(&self) -> Result<()> {
        check_finite("alpha", self.alpha)?;
        if self.alpha <= 2.0 {
            return Err(Error::param("alpha", format!("{} must exceed 2", self.alpha)));
        }
        positive("lambda_bs", self.lambda_bs)?;
        positive("r_c", self.r_c)?;
        non_negative("p_d", self.p_d)?;
        non_negative("p_0", self.p_0)?;
        non_negative("p_max_u", self.p_max_u)?;
        non_negative("sigma2", self.sigma2)?;
        positive("window_len", self.window_len)?;
        check_finite("epsilon", self.epsilon)?;
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::param(
                "epsilon",
                format!("{} outside [0, 1]", self.epsilon),
            ));
        }
        Ok(())
    }
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioBuilder::default()
            .build()
            .expect("default scenario is valid")
    }
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} is not finite")))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be positive")))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be non-negative")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PowerSetting {
    Dbm(f64),
    Linear(f64),
}

impl PowerSetting {
    fn resolve(self, unit: PowerUnit) -> f64 {
        match self {
            PowerSetting::Dbm(x) => dbm_to_linear(x, unit),
            PowerSetting::Linear(x) => x,
        }
    }
}

/// Builder for [`ScenarioParams`].
///
/// Defaults: alpha 4, inter-BS distance 400 m (r_c 200 m, density
/// `1/(pi r_c^2)`), P_d 40 dBm, P_0 -64 dBm, P_max 23 dBm, epsilon 0.2,
/// no noise, 10 km window, all powers in milliwatts.
#[derive(Debug, Clone)]
pub struct ScenarioBuilder {
    alpha: f64,
    lambda_bs: Option<f64>,
    r_c: f64,
    p_d: PowerSetting,
    p_0: PowerSetting,
    p_max_u: PowerSetting,
    epsilon: f64,
    sigma2: f64,
    window_len: f64,
    units: PowerUnitConvention,
    d_bs: Option<f64>,
}

impl Default for ScenarioBuilder {
    fn default() -> Self {
        Self {
            alpha: 4.0,
            lambda_bs: None,
            r_c: 200.0,
            p_d: PowerSetting::Dbm(40.0),
            p_0: PowerSetting::Dbm(-64.0),
            p_max_u: PowerSetting::Dbm(23.0),
            epsilon: 0.2,
            sigma2: 0.0,
            window_len: 10_000.0,
            units: PowerUnitConvention::MILLIWATT,
            d_bs: None,
        }
    }
}

impl ScenarioBuilder {
    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Sets the cell radius to `d_bs / 2` and resets the density to
    /// `1/(pi r_c^2)`.
    pub fn inter_bs_distance(mut self, d_bs: f64) -> Self {
        self.d_bs = Some(d_bs);
        self.r_c = d_bs / 2.0;
        self.lambda_bs = None;
        self
    }

    /// Sets the cell radius; the density follows as `1/(pi r_c^2)` unless set
    /// explicitly with [`Self::lambda_bs`].
    pub fn cluster_radius(mut self, r_c: f64) -> Self {
        self.d_bs = None;
        self.r_c = r_c;
        self
    }

    pub fn lambda_bs(mut self, lambda: f64) -> Self {
        self.lambda_bs = Some(lambda);
        self
    }

    /// Recouples the density to the current radius.
    pub fn coupled_density(mut self) -> Self {
        self.lambda_bs = None;
        self
    }

    pub fn p_d_dbm(mut self, x: f64) -> Self {
        self.p_d = PowerSetting::Dbm(x);
        self
    }

    pub fn p_d_linear(mut self, p: f64) -> Self {
        self.p_d = PowerSetting::Linear(p);
        self
    }

    pub fn p_0_dbm(mut self, x: f64) -> Self {
        self.p_0 = PowerSetting::Dbm(x);
        self
    }

    pub fn p_0_linear(mut self, p: f64) -> Self {
        self.p_0 = PowerSetting::Linear(p);
        self
    }

    /// The ceiling is always read in milliwatts when given in dBm.
    pub fn p_max_u_dbm(mut self, x: f64) -> Self {
        self.p_max_u = PowerSetting::Dbm(x);
        self
    }

    pub fn p_max_u_linear(mut self, p: f64) -> Self {
        self.p_max_u = PowerSetting::Linear(p);
        self
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn sigma2(mut self, sigma2: f64) -> Self {
        self.sigma2 = sigma2;
        self
    }

    pub fn window_len(mut self, len: f64) -> Self {
        self.window_len = len;
        self
    }

    pub fn units(mut self, units: PowerUnitConvention) -> Self {
        self.units = units;
        self
    }

    pub fn build(self) -> Result<ScenarioParams> {
        if let Some(d) = self.d_bs {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::param(
                    "inter_bs_distance",
                    format!("{d} must be positive"),
                ));
            }
        }
        positive("r_c", self.r_c)?;
        let lambda_bs = self.lambda_bs.unwrap_or_else(|| density_for_radius(self.r_c));
        let params = ScenarioParams {
            alpha: self.alpha,
            lambda_bs,
            r_c: self.r_c,
            p_d: self.p_d.resolve(self.units.p_d_unit),
            p_0: self.p_0.resolve(self.units.p0_unit),
            p_max_u: self.p_max_u.resolve(PowerUnit::Milliwatt),
            epsilon: self.epsilon,
            sigma2: self.sigma2,
            window_len: self.window_len,
            units: self.units,
        };
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dbm_conversions() {
        assert_eq!(dbm_to_linear(0.0, PowerUnit::Milliwatt), 1.0);
        assert!((dbm_to_linear(40.0, PowerUnit::Milliwatt) - 10_000.0).abs() < 1e-9);
        let w = dbm_to_linear(-64.0, PowerUnit::Watt);
        assert!((w / 3.981_071_705_534_97e-10 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inter_bs_distance_couples_density() {
        let p = ScenarioParams::from_inter_bs_distance(400.0).unwrap();
        assert_eq!(p.r_c(), 200.0);
        assert!((p.lambda_bs() - 7.957_747_154_594_767e-6).abs() < 1e-18);

        let p = ScenarioParams::from_inter_bs_distance(800.0).unwrap();
        assert_eq!(p.r_c(), 400.0);
        assert!((p.lambda_bs() / 1.989_436_788_648_692e-6 - 1.0).abs() < 1e-12);

        assert!(ScenarioParams::from_inter_bs_distance(0.0).is_err());
        assert!(ScenarioParams::from_inter_bs_distance(-5.0).is_err());
    }

    #[test]
    fn rejects_invalid_fields() {
        let bad = [
            ScenarioParams::builder().alpha(2.0).build(),
            ScenarioParams::builder().epsilon(1.5).build(),
            ScenarioParams::builder().epsilon(-0.1).build(),
            ScenarioParams::builder().cluster_radius(0.0).build(),
            ScenarioParams::builder().lambda_bs(0.0).build(),
            ScenarioParams::builder().sigma2(-1.0).build(),
            ScenarioParams::builder().p_d_linear(-1.0).build(),
            ScenarioParams::builder().window_len(f64::NAN).build(),
        ];
        for b in bad {
            assert!(matches!(b, Err(Error::InvalidParameter { .. })));
        }
    }

    #[test]
    fn unit_convention_changes_baseline_only() {
        let mw = ScenarioParams::builder().build().unwrap();
        let w = ScenarioParams::builder()
            .units(PowerUnitConvention::P0_WATT)
            .build()
            .unwrap();
        assert!((mw.p_0() / w.p_0() - 1000.0).abs() < 1e-9);
        assert_eq!(mw.p_d(), w.p_d());
    }

    #[test]
    fn json_round_trip_validates() {
        let p = ScenarioParams::builder().epsilon(0.8).build().unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: ScenarioParams = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);

        let broken = text.replace("\"epsilon\":0.8", "\"epsilon\":3.0");
        assert!(serde_json::from_str::<ScenarioParams>(&broken).is_err());
    }

    proptest! {
        #[test]
        fn dbm_round_trip(x in -150.0f64..60.0, watt in any::<bool>()) {
            let unit = if watt { PowerUnit::Watt } else { PowerUnit::Milliwatt };
            let back = linear_to_dbm(dbm_to_linear(x, unit), unit);
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn coupled_density_covers_one_disk(d in 1.0f64..1e5) {
            let p = ScenarioParams::from_inter_bs_distance(d).unwrap();
            prop_assert!((p.lambda_bs() * PI * p.r_c() * p.r_c() - 1.0).abs() < 1e-12);
            prop_assert!(p.r_c() <= d / 2.0);
        }
    }
}
