//! Parameter bundles for each published figure and table.
//!
//! The published curves do not share one power-unit convention. Coverage and
//! rate figures read the -64 dBm baseline in milliwatts, the uplink coverage
//! curves use a 200 m cluster radius (half the 400 m inter-BS distance), and
//! the inverse-SINR bounds read the baseline in watts. Each preset fixes its
//! convention, and the manifest written next to every curve records it.

use super::config::{parse_grid, Figure, RunConfig, Task};
use crate::error::Result;
use crate::radio::{Duplex, Link};
use crate::scenario::{PowerUnitConvention, ScenarioBuilder, ScenarioParams};

/// Rates at which the uplink rate CDF is tabulated; its mass sits far below
/// 1 bps/Hz.
pub const UL_RATE_GRID: &str = "0,0.005,0.01,0.02,0.04,0.065,0.1,0.2,0.3,0.5,1:1:15";

/// One curve (or table row) to compute.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJob {
    pub name: String,
    pub config: RunConfig,
}

fn base_scenario(base: &RunConfig) -> ScenarioBuilder {
    ScenarioParams::builder()
        .inter_bs_distance(400.0)
        .p_0_dbm(-64.0)
        .window_len(base.scenario.window_len())
}

fn job(
    base: &RunConfig,
    figure: Figure,
    name: String,
    task: Task,
    link: Link,
    duplex: Duplex,
    scenario: ScenarioBuilder,
) -> Result<CurveJob> {
    let mut config = base.clone();
    config.scenario = scenario.build()?;
    config.task = task;
    config.link = link;
    config.duplex = duplex;
    config.figure = Some(figure);
    config.curve = Some(name.clone());
    Ok(CurveJob { name, config })
}

/// FD configurations `(epsilon, P_d dBm)` of the uplink and rate studies.
pub const FD_CONFIGS: [(f64, f64); 4] = [(0.2, 40.0), (0.8, 40.0), (0.2, 23.0), (0.8, 23.0)];

/// Every curve of `figure`. Drop count, seed, method and numerical settings
/// come from `base`; model parameters are fixed by the preset.
pub fn figure_jobs(figure: Figure, base: &RunConfig) -> Result<Vec<CurveJob>> {
    let grid = |s: &str| parse_grid(s).expect("preset grids are valid");
    let mut jobs = Vec::new();
    match figure {
        Figure::Fig2 => {
            let t = grid("-40:5:40");
            let mut hd = job(base, figure, "fig2_hd".into(), Task::Coverage, Link::Dl, Duplex::Hd, base_scenario(base))?;
            hd.config.thresholds_db = t.clone();
            jobs.push(hd);
            for eps in [0.2, 0.8] {
                let s = base_scenario(base).epsilon(eps);
                let mut j = job(base, figure, format!("fig2_fd_eps{eps}"), Task::Coverage, Link::Dl, Duplex::Fd, s)?;
                j.config.thresholds_db = t.clone();
                jobs.push(j);
            }
        }
        Figure::Fig3 => {
            for (eps, pd) in [(0.8, 40.0), (0.2, 40.0), (0.8, 23.0), (0.2, 23.0)] {
                let s = base_scenario(base).epsilon(eps).p_d_dbm(pd);
                let mut j = job(base, figure, format!("fig3_eps{eps}_pd{pd}"), Task::Coverage, Link::Ul, Duplex::Fd, s)?;
                j.config.thresholds_db = grid("-100:5:20");
                jobs.push(j);
            }
        }
        Figure::Fig4 => {
            for link in [Link::Dl, Link::Ul] {
                for (r, eps) in [(400.0, 0.2), (400.0, 0.8), (200.0, 0.2), (200.0, 0.8)] {
                    let s = base_scenario(base)
                        .cluster_radius(r)
                        .coupled_density()
                        .epsilon(eps)
                        .units(PowerUnitConvention::P0_WATT);
                    let name = format!("fig4_{link}_r{r}_eps{eps}");
                    let mut j = job(base, figure, name, Task::InverseSinr, link, Duplex::Fd, s)?;
                    j.config.pd_grid_dbm = grid("23:1:40");
                    jobs.push(j);
                }
            }
        }
        Figure::Fig5 => {
            let s = base_scenario(base).epsilon(0.8).p_d_dbm(23.0);
            let mut ul = job(base, figure, "fig5_ul_fd_pd23_eps0.8".into(), Task::Rate, Link::Ul, Duplex::Fd, s)?;
            ul.config.rate_grid = grid(UL_RATE_GRID);
            jobs.push(ul);
            for pd in [40.0, 23.0] {
                let s = base_scenario(base).epsilon(0.8).p_d_dbm(pd);
                let mut j = job(base, figure, format!("fig5_dl_fd_pd{pd}_eps0.8"), Task::Rate, Link::Dl, Duplex::Fd, s)?;
                j.config.rate_grid = grid("0:1:15");
                jobs.push(j);
            }
            let mut hd = job(base, figure, "fig5_dl_hd".into(), Task::Rate, Link::Dl, Duplex::Hd, base_scenario(base))?;
            hd.config.rate_grid = grid("0:1:15");
            jobs.push(hd);
        }
        Figure::Table1 => {
            for (eps, pd) in FD_CONFIGS {
                let s = base_scenario(base).epsilon(eps).p_d_dbm(pd);
                jobs.push(job(base, figure, format!("fd_eps{eps}_pd{pd}"), Task::Rate, Link::Dl, Duplex::Fd, s)?);
            }
            jobs.push(job(base, figure, "hd".into(), Task::Rate, Link::Dl, Duplex::Hd, base_scenario(base))?);
        }
    }
    Ok(jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::reference;

    #[test]
    fn curve_names_match_reference_data() {
        let base = RunConfig::default();
        for figure in [Figure::Fig2, Figure::Fig3, Figure::Fig4, Figure::Fig5] {
            let jobs = figure_jobs(figure, &base).unwrap();
            let refs = reference::figure_curves(figure).unwrap();
            assert_eq!(jobs.len(), refs.len());
            for j in &jobs {
                let (_, rows) = refs.iter().find(|r| r.0 == j.name).unwrap_or_else(|| panic!("{}", j.name));
                let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
                let grid = match j.config.task {
                    Task::Coverage => &j.config.thresholds_db,
                    Task::InverseSinr => &j.config.pd_grid_dbm,
                    _ => &j.config.rate_grid,
                };
                assert_eq!(&xs, grid, "{}", j.name);
            }
        }
        let rows = reference::table1().unwrap();
        let jobs = figure_jobs(Figure::Table1, &base).unwrap();
        let labels: Vec<_> = rows.iter().map(|r| r.label.clone()).collect();
        let names: Vec<_> = jobs.iter().map(|j| j.name.clone()).collect();
        assert_eq!(labels, names);
    }

    #[test]
    fn conventions() {
        let base = RunConfig::default();
        let fig3 = figure_jobs(Figure::Fig3, &base).unwrap();
        assert!(fig3.iter().all(|j| j.config.scenario.r_c() == 200.0));
        assert!(fig3.iter().all(|j| j.config.scenario.units() == PowerUnitConvention::MILLIWATT));
        let fig4 = figure_jobs(Figure::Fig4, &base).unwrap();
        assert!(fig4.iter().all(|j| j.config.scenario.units() == PowerUnitConvention::P0_WATT));
        let r400 = &fig4[0].config.scenario;
        assert_eq!(r400.r_c(), 400.0);
        assert!((r400.lambda_bs() * std::f64::consts::PI * 400.0 * 400.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_cap_never_binds_inside_a_cell() {
        let base = RunConfig::default();
        for figure in Figure::ALL {
            for j in figure_jobs(*figure, &base).unwrap() {
                let s = &j.config.scenario;
                assert!(s.saturation_distance() > s.r_c(), "{}", j.name);
            }
        }
    }
}
