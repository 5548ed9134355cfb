//! Drop-based estimation of coverage, inverse-SINR moments and rates.
//!
//! Every drop draws from its own ChaCha stream, selected by the drop index
//! under the master seed, so results are bit-identical for any number of
//! worker threads. Reductions run over per-drop results collected in drop
//! order.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NetworkRealization;
use crate::radio::{link_budget, Duplex, FadingDraws, InterferenceSet, Link, PathLossModel};
use crate::scenario::{from_db, to_db, ScenarioParams};

/// Normal quantile for two-sided 95% intervals.
pub const Z_95: f64 = 1.96;

/// Largest tolerated fraction of drops resampled for degenerate geometry.
pub const MAX_DEGENERATE_FRACTION: f64 = 1e-3;

/// Redraws per drop before giving up on a degenerate configuration.
const MAX_ATTEMPTS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMethod {
    Sim,
    Analytic,
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveMethod::Sim => "sim",
            CurveMethod::Analytic => "analytic",
        })
    }
}

impl FromStr for CurveMethod {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "sim" => Ok(CurveMethod::Sim),
            "analytic" => Ok(CurveMethod::Analytic),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

/// Drop count, seed and parallelism for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_drops: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool. Never affects results.
    pub workers: Option<usize>,
    /// Include uplink users of other cells as interferers.
    pub other_cell_ul: bool,
}

impl McConfig {
    pub fn new(n_drops: u64, seed: u64) -> Self {
        Self {
            n_drops,
            seed,
            workers: None,
            other_cell_ul: true,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn without_other_cell_ul(mut self) -> Self {
        self.other_cell_ul = false;
        self
    }

    fn terms(&self, link: Link, duplex: Duplex) -> InterferenceSet {
        let terms = InterferenceSet::for_link(link, duplex);
        if self.other_cell_ul {
            terms
        } else {
            terms.without_other_cell_ul()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_drops == 0 {
            return Err(Error::param("n_drops", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", "must be at least 1"));
        }
        Ok(())
    }
}

/// Per-drop values plus the number of redraws spent on degenerate geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct DropResults<T> {
    pub values: Vec<T>,
    pub degenerate: u64,
}

/// RNG for drop `index` under `seed`.
pub fn drop_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `per_drop` on `cfg.n_drops` independent realizations. Drops whose
/// geometry is degenerate (or whose SINR is unbounded) are redrawn from the
/// same stream and counted.
pub fn run_drops<T, F>(params: &ScenarioParams, cfg: &McConfig, per_drop: F) -> Result<DropResults<T>>
where
    T: Send,
    F: Fn(&NetworkRealization, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    cfg.validate()?;
    let one = |index: u64| -> Result<(T, u64)> {
        let mut rng = drop_rng(cfg.seed, index);
        for attempt in 0..MAX_ATTEMPTS {
            let real = NetworkRealization::sample(params, &mut rng)?;
            match per_drop(&real, &mut rng) {
                Ok(v) => return Ok((v, attempt as u64)),
                Err(Error::DegenerateGeometry(_) | Error::UnboundedSinr) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::DegenerateGeometry(format!(
            "drop {index} stayed degenerate after {MAX_ATTEMPTS} redraws"
        )))
    };
    let collected: Result<Vec<(T, u64)>> = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?
            .install(|| (0..cfg.n_drops).into_par_iter().map(one).collect()),
        None => (0..cfg.n_drops).into_par_iter().map(one).collect(),
    };
    let mut degenerate = 0;
    let values = collected?
        .into_iter()
        .map(|(v, redraws)| {
            degenerate += redraws;
            v
        })
        .collect();
    if degenerate as f64 > MAX_DEGENERATE_FRACTION * cfg.n_drops as f64 {
        return Err(Error::TooManyDegenerateDrops {
            discarded: degenerate,
            requested: cfg.n_drops,
        });
    }
    Ok(DropResults { values, degenerate })
}

/// One SINR per drop with Rayleigh fading and plain path loss.
pub fn simulate_sinr(
    params: &ScenarioParams,
    link: Link,
    duplex: Duplex,
    cfg: &McConfig,
) -> Result<DropResults<f64>> {
    let terms = cfg.terms(link, duplex);
    run_drops(params, cfg, |real, rng| {
        let fad = FadingDraws::sample(real.len(), rng);
        link_budget(link, real, &fad, params, terms, PathLossModel::Plain)?.sinr()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub link: Link,
    pub duplex: Duplex,
    pub method: CurveMethod,
    pub params: ScenarioParams,
    pub n_drops: Option<u64>,
    pub seed: Option<u64>,
    pub degenerate_drops: u64,
}

/// Ordered `(threshold, probability)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub thresholds_db: Vec<f64>,
    pub probability: Vec<f64>,
    /// 95% normal-approximation half widths; zero for analytic curves.
    pub ci_half_width: Vec<f64>,
    pub meta: CurveMeta,
}

/// Binomial 95% half width; reliable for `n >= 1e3` and `p` in `[0.01, 0.99]`.
pub fn binomial_ci(p: f64, n: u64) -> f64 {
    Z_95 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Fraction of samples strictly above each threshold.
pub fn coverage_from_samples(samples: &[f64], thresholds_db: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as u64;
    thresholds_db
        .iter()
        .map(|&t_db| {
            let t = from_db(t_db);
            let above = sorted.len() - sorted.partition_point(|&s| s <= t);
            let p = above as f64 / n as f64;
            (p, binomial_ci(p, n))
        })
        .unzip()
}

/// Simulated `P[SINR > T]` for every threshold (dB).
pub fn estimate_coverage(
    params: &ScenarioParams,
    link: Link,
    duplex: Duplex,
    thresholds_db: &[f64],
    cfg: &McConfig,
) -> Result<CoverageCurve> {
    if thresholds_db.is_empty() {
        return Err(Error::param("thresholds", "need at least one threshold"));
    }
    let sinr = simulate_sinr(params, link, duplex, cfg)?;
    let (probability, ci_half_width) = coverage_from_samples(&sinr.values, thresholds_db);
    Ok(CoverageCurve {
        thresholds_db: thresholds_db.to_vec(),
        probability,
        ci_half_width,
        meta: CurveMeta {
            link,
            duplex,
            method: CurveMethod::Sim,
            params: params.clone(),
            n_drops: Some(cfg.n_drops),
            seed: Some(cfg.seed),
            degenerate_drops: sinr.degenerate,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_inv_sinr_db: f64,
    pub mean_sinr_db: f64,
    pub n_drops: u64,
    /// Standard error of the inverse-SINR mean, in dB.
    pub std_error: f64,
}

/// Inverse SINR of one drop with unit fading and regularised path loss.
pub fn inverse_sinr_sample(
    real: &NetworkRealization,
    params: &ScenarioParams,
    link: Link,
    terms: InterferenceSet,
) -> Result<f64> {
    let fad = FadingDraws::unit(real.len());
    let b = link_budget(link, real, &fad, params, terms, PathLossModel::Regularized)?;
    Ok((b.noise + b.interference()) / b.signal)
}

/// Average inverse SINR of the full-duplex link without fading.
pub fn estimate_inverse_sinr(params: &ScenarioParams, link: Link, cfg: &McConfig) -> Result<MomentReport> {
    let terms = cfg.terms(link, Duplex::Fd);
    let drops = run_drops(params, cfg, |real, _rng| inverse_sinr_sample(real, params, link, terms))?;
    let n = drops.values.len() as f64;
    let mean_inv = drops.values.iter().sum::<f64>() / n;
    let mean_sinr = drops.values.iter().map(|v| 1.0 / v).sum::<f64>() / n;
    let var = if n > 1.0 {
        drops.values.iter().map(|v| (v - mean_inv).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let se = (var / n).sqrt();
    let report = MomentReport {
        mean_inv_sinr_db: to_db(mean_inv),
        mean_sinr_db: to_db(mean_sinr),
        n_drops: cfg.n_drops,
        std_error: 10.0 / std::f64::consts::LN_10 * se / mean_inv,
    };
    if !(report.mean_inv_sinr_db.is_finite() && report.mean_sinr_db.is_finite()) {
        return Err(Error::param("params", "inverse SINR is not finite for this scenario"));
    }
    Ok(report)
}

/// Mean, cell-edge rate and the empirical rate distribution of one
/// configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    pub mean_rate: f64,
    pub cell_edge_rate: f64,
    /// Rate samples in ascending order; empty for analytic profiles.
    pub sorted_rates: Vec<f64>,
}

impl RateProfile {
    /// Empirical `P[C <= c]`.
    pub fn cdf(&self, c: f64) -> f64 {
        let n = self.sorted_rates.len();
        if n == 0 {
            return f64::NAN;
        }
        self.sorted_rates.partition_point(|&r| r <= c) as f64 / n as f64
    }
}

/// `k log2(1 + SINR)` per sample.
pub fn rates_from_sinr(sinr: &[f64], duplex: Duplex) -> Vec<f64> {
    let k = duplex.rate_factor();
    sinr.iter().map(|s| k * s.ln_1p() / std::f64::consts::LN_2).collect()
}

/// Nearest-rank quantile of ascending data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

pub fn rate_profile_from_sinr(sinr: &[f64], duplex: Duplex) -> RateProfile {
    let mut rates = rates_from_sinr(sinr, duplex);
    rates.sort_by(f64::total_cmp);
    RateProfile {
        mean_rate: rates.iter().sum::<f64>() / rates.len() as f64,
        cell_edge_rate: quantile_sorted(&rates, crate::analytic::rate::CELL_EDGE_QUANTILE),
        sorted_rates: rates,
    }
}

pub fn estimate_rate_stats(
    params: &ScenarioParams,
    link: Link,
    duplex: Duplex,
    cfg: &McConfig,
) -> Result<RateProfile> {
    let sinr = simulate_sinr(params, link, duplex, cfg)?;
    Ok(rate_profile_from_sinr(&sinr.values, duplex))
}
