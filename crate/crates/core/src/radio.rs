//! Path loss, Rayleigh fading, fractional uplink power control and SINR
//! assembly for the tagged downlink or uplink receiver.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{NetworkRealization, Point};
use crate::scenario::ScenarioParams;

/// Links closer than this are treated as degenerate under plain path loss.
pub const MIN_LINK_DISTANCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Dl,
    Ul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Duplex {
    Hd,
    Fd,
}

impl Duplex {
    /// Bandwidth multiplier on `log2(1 + SINR)`.
    pub fn rate_factor(self) -> f64 {
        match self {
            Duplex::Hd => 1.0,
            Duplex::Fd => 2.0,
        }
    }
}

macro_rules! text_enum {
    ($ty:ty { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $text),+ }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($text => Ok(Self::$variant),)+
                    other => Err(format!(
                        "unknown value `{other}` (expected one of: {})",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

text_enum!(Link { Dl => "dl", Ul => "ul" });
text_enum!(Duplex { Hd => "hd", Fd => "fd" });

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLossModel {
    /// `x^-alpha`
    Plain,
    /// `(1 + x)^-alpha`, finite at the origin.
    Regularized,
}

/// Received power from a unit-power transmitter at distance `x`.
pub fn path_loss(x: f64, alpha: f64, model: PathLossModel) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::param("distance", format!("{x} must be non-negative")));
    }
    match model {
        PathLossModel::Plain if x == 0.0 => Err(Error::DegenerateGeometry(
            "plain path loss is singular at zero distance".into(),
        )),
        PathLossModel::Plain => Ok(x.powf(-alpha)),
        PathLossModel::Regularized => Ok((1.0 + x).powf(-alpha)),
    }
}

/// Rayleigh power gain `|h|^2 ~ Exp(1)`, deterministic in `seed`.
pub fn draw_fading(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fading(&mut rng)
}

pub fn fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Fractional power control, `min(P_max, P_0 r_u^(alpha eps))`.
pub fn uplink_power(r_u: f64, params: &ScenarioParams) -> f64 {
    let exponent = params.alpha() * params.epsilon();
    let p = if exponent == 0.0 {
        params.p_0()
    } else {
        params.p_0() * r_u.powf(exponent)
    };
    p.min(params.p_max_u())
}

/// Desired power, itemised interference and noise at one receiver.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkBudget {
    pub signal: f64,
    pub same_cell_cross_interference: f64,
    pub other_cell_dl: f64,
    pub other_cell_ul: f64,
    pub noise: f64,
}

impl LinkBudget {
    pub fn interference(&self) -> f64 {
        self.same_cell_cross_interference + self.other_cell_dl + self.other_cell_ul
    }

    pub fn sinr(&self) -> Result<f64> {
        let denom = self.noise + self.interference();
        if denom > 0.0 {
            Ok(self.signal / denom)
        } else {
            Err(Error::UnboundedSinr)
        }
    }
}

/// Which interference terms enter a budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterferenceSet {
    /// Downlink receiver only: the co-cell uplink user.
    pub same_cell_cross: bool,
    pub other_cell_dl: bool,
    pub other_cell_ul: bool,
}

impl InterferenceSet {
    /// Terms present for a link in a duplex mode. Half duplex separates uplink
    /// and downlink resources, so each link only sees its own direction.
    pub fn for_link(link: Link, duplex: Duplex) -> Self {
        match (link, duplex) {
            (Link::Dl, Duplex::Fd) => Self {
                same_cell_cross: true,
                other_cell_dl: true,
                other_cell_ul: true,
            },
            (Link::Dl, Duplex::Hd) => Self {
                same_cell_cross: false,
                other_cell_dl: true,
                other_cell_ul: false,
            },
            (Link::Ul, Duplex::Fd) => Self {
                same_cell_cross: false,
                other_cell_dl: true,
                other_cell_ul: true,
            },
            (Link::Ul, Duplex::Hd) => Self {
                same_cell_cross: false,
                other_cell_dl: false,
                other_cell_ul: true,
            },
        }
    }

    pub fn without_other_cell_ul(mut self) -> Self {
        self.other_cell_ul = false;
        self
    }
}

/// Power gains for one drop, indexed by cell.
///
/// `dl[i]` / `ul[i]` are the gains from BS `i` / uplink user `i` to the tagged
/// downlink receiver; `dl_at_bs[i]` / `ul_at_bs[i]` the gains to the tagged BS.
/// Tagged-cell entries hold the desired and same-cell links.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingDraws {
    pub dl: Vec<f64>,
    pub ul: Vec<f64>,
    pub dl_at_bs: Vec<f64>,
    pub ul_at_bs: Vec<f64>,
}

impl FadingDraws {
    pub fn sample<R: Rng + ?Sized>(n_cells: usize, rng: &mut R) -> Self {
        let mut draw = |n| (0..n).map(|_| fading(rng)).collect::<Vec<_>>();
        Self {
            dl: draw(n_cells),
            ul: draw(n_cells),
            dl_at_bs: draw(n_cells),
            ul_at_bs: draw(n_cells),
        }
    }

    /// Every gain equal to one.
    pub fn unit(n_cells: usize) -> Self {
        Self {
            dl: vec![1.0; n_cells],
            ul: vec![1.0; n_cells],
            dl_at_bs: vec![1.0; n_cells],
            ul_at_bs: vec![1.0; n_cells],
        }
    }
}

fn gain(from: Point, to: Point, alpha: f64, model: PathLossModel) -> Result<f64> {
    let d = from.distance(to);
    if model == PathLossModel::Plain && d < MIN_LINK_DISTANCE {
        return Err(Error::DegenerateGeometry(format!(
            "link of {d:.3e} m is shorter than {MIN_LINK_DISTANCE} m"
        )));
    }
    path_loss(d, alpha, model)
}

/// Budget at the tagged downlink user.
pub fn downlink_budget(
    real: &NetworkRealization,
    fad: &FadingDraws,
    params: &ScenarioParams,
    terms: InterferenceSet,
    model: PathLossModel,
) -> Result<LinkBudget> {
    let alpha = params.alpha();
    let t = real.tagged_cell();
    let rx = real.tagged_dl_user();
    let bs = real.tagged_bs();
    let mut budget = LinkBudget {
        signal: params.p_d() * fad.dl[t] * gain(bs, rx, alpha, model)?,
        noise: params.sigma2(),
        ..LinkBudget::default()
    };
    if terms.same_cell_cross {
        let ue = real.tagged_ul_user();
        budget.same_cell_cross_interference =
            uplink_power(ue.distance(bs), params) * fad.ul[t] * gain(ue, rx, alpha, model)?;
    }
    for i in real.other_cells() {
        let other_bs = real.bs_positions()[i];
        if terms.other_cell_dl {
            budget.other_cell_dl += params.p_d() * fad.dl[i] * gain(other_bs, rx, alpha, model)?;
        }
        if terms.other_cell_ul {
            let ue = real.ul_users()[i];
            budget.other_cell_ul += uplink_power(ue.distance(other_bs), params)
                * fad.ul[i]
                * gain(ue, rx, alpha, model)?;
        }
    }
    Ok(budget)
}

/// Budget at the tagged BS receiving its uplink user. The BS's own downlink
/// transmission is cancelled and never enters.
pub fn uplink_budget(
    real: &NetworkRealization,
    fad: &FadingDraws,
    params: &ScenarioParams,
    terms: InterferenceSet,
    model: PathLossModel,
) -> Result<LinkBudget> {
    let alpha = params.alpha();
    let t = real.tagged_cell();
    let rx = real.tagged_bs();
    let ue = real.tagged_ul_user();
    let mut budget = LinkBudget {
        signal: uplink_power(ue.distance(rx), params) * fad.ul_at_bs[t] * gain(ue, rx, alpha, model)?,
        noise: params.sigma2(),
        ..LinkBudget::default()
    };
    for i in real.other_cells() {
        let other_bs = real.bs_positions()[i];
        if terms.other_cell_dl {
            budget.other_cell_dl +=
                params.p_d() * fad.dl_at_bs[i] * gain(other_bs, rx, alpha, model)?;
        }
        if terms.other_cell_ul {
            let other_ue = real.ul_users()[i];
            budget.other_cell_ul += uplink_power(other_ue.distance(other_bs), params)
                * fad.ul_at_bs[i]
                * gain(other_ue, rx, alpha, model)?;
        }
    }
    Ok(budget)
}

pub fn downlink_sinr(
    real: &NetworkRealization,
    fad: &FadingDraws,
    params: &ScenarioParams,
    terms: InterferenceSet,
) -> Result<f64> {
    downlink_budget(real, fad, params, terms, PathLossModel::Plain)?.sinr()
}

pub fn uplink_sinr(
    real: &NetworkRealization,
    fad: &FadingDraws,
    params: &ScenarioParams,
    terms: InterferenceSet,
) -> Result<f64> {
    uplink_budget(real, fad, params, terms, PathLossModel::Plain)?.sinr()
}

/// Budget for `link`, dispatching on direction.
pub fn link_budget(
    link: Link,
    real: &NetworkRealization,
    fad: &FadingDraws,
    params: &ScenarioParams,
    terms: InterferenceSet,
    model: PathLossModel,
) -> Result<LinkBudget> {
    match link {
        Link::Dl => downlink_budget(real, fad, params, terms, model),
        Link::Ul => uplink_budget(real, fad, params, terms, model),
    }
}
