//! Executes tasks and writes result files.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use super::config::{Figure, Method, RunConfig, Task, RESULTS_KEY};
use super::presets::{figure_jobs, CurveJob};
use super::table::{write_curve_file, write_rate_table, CurveRow, RateCells, RateRow};
use crate::analytic::{self, mean_inverse_sinr_dl, mean_inverse_sinr_ul};
use crate::error::{Error, Result};
use crate::montecarlo::{binomial_ci, estimate_coverage, estimate_inverse_sinr, estimate_rate_stats, Z_95};
use crate::radio::{Duplex, Link};
use crate::scenario::from_db;

/// Mean and cell-edge rate of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSummary {
    pub mean: f64,
    pub edge: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskOutput {
    pub rows: Vec<CurveRow>,
    pub analytic_rates: Option<RateSummary>,
    pub sim_rates: Option<RateSummary>,
}

/// Whether the analytic column is computed. Half-duplex uplink has no
/// analytic form: asking for it alone is an error, with `both` the column
/// stays empty.
fn analytic_wanted(cfg: &RunConfig) -> Result<bool> {
    if !cfg.method.wants_analytic() {
        return Ok(false);
    }
    let unavailable = cfg.link == Link::Ul && cfg.duplex == Duplex::Hd;
    match (unavailable, cfg.method) {
        (true, Method::Analytic) => Err(Error::param(
            "method",
            "no analytic half-duplex uplink; use method=sim or method=both",
        )),
        (true, _) => Ok(false),
        (false, _) => Ok(true),
    }
}

pub fn coverage_rows(cfg: &RunConfig) -> Result<Vec<CurveRow>> {
    let mut rows: Vec<CurveRow> = cfg.thresholds_db.iter().map(|&t| CurveRow::new(t)).collect();
    if analytic_wanted(cfg)? {
        for r in &mut rows {
            let p = analytic::coverage(cfg.link, cfg.duplex, from_db(r.x), &cfg.scenario, &cfg.quad, cfg.same_cell)?;
            r.analytic = Some(p);
        }
    }
    if cfg.method.wants_sim() {
        let curve = estimate_coverage(&cfg.scenario, cfg.link, cfg.duplex, &cfg.thresholds_db, &cfg.mc())?;
        for (i, r) in rows.iter_mut().enumerate() {
            r.sim = Some(curve.probability[i]);
            r.sim_ci = Some(curve.ci_half_width[i]);
        }
    }
    Ok(rows)
}

/// Average inverse SINR (dB) of the full-duplex link against `P_d` (dBm).
pub fn inverse_sinr_rows(cfg: &RunConfig) -> Result<Vec<CurveRow>> {
    if cfg.duplex != Duplex::Fd {
        return Err(Error::param("duplex", "inverse-SINR bounds are full-duplex only"));
    }
    let mut rows = Vec::with_capacity(cfg.pd_grid_dbm.len());
    for &pd in &cfg.pd_grid_dbm {
        let params = cfg.scenario.to_builder().p_d_dbm(pd).build()?;
        let mut row = CurveRow::new(pd);
        if cfg.method.wants_analytic() {
            let v = match cfg.link {
                Link::Dl => mean_inverse_sinr_dl(&params)?,
                Link::Ul => mean_inverse_sinr_ul(&params)?,
            };
            row.analytic = Some(v.db);
        }
        if cfg.method.wants_sim() {
            let m = estimate_inverse_sinr(&params, cfg.link, &cfg.mc())?;
            row.sim = Some(m.mean_inv_sinr_db);
            row.sim_ci = Some(Z_95 * m.std_error);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Rate CDF on the rate grid; with `summary`, also mean and cell-edge rate.
pub fn rate_rows(cfg: &RunConfig, summary: bool) -> Result<TaskOutput> {
    let mut out = TaskOutput {
        rows: cfg.rate_grid.iter().map(|&c| CurveRow::new(c)).collect(),
        analytic_rates: None,
        sim_rates: None,
    };
    if analytic_wanted(cfg)? {
        let cov = |t: f64| analytic::coverage(cfg.link, cfg.duplex, t, &cfg.scenario, &cfg.quad, cfg.same_cell);
        for r in &mut out.rows {
            r.analytic = Some(analytic::rate_cdf(cov, cfg.duplex, r.x)?);
        }
        if summary {
            let (mean, edge) = analytic::rate_profile(cfg.link, cfg.duplex, &cfg.scenario, &cfg.quad, cfg.same_cell)?;
            out.analytic_rates = Some(RateSummary { mean, edge });
        }
    }
    if cfg.method.wants_sim() {
        let profile = estimate_rate_stats(&cfg.scenario, cfg.link, cfg.duplex, &cfg.mc())?;
        let n = profile.sorted_rates.len() as u64;
        for r in &mut out.rows {
            let p = profile.cdf(r.x);
            r.sim = Some(p);
            r.sim_ci = Some(binomial_ci(p, n));
        }
        if summary {
            out.sim_rates = Some(RateSummary {
                mean: profile.mean_rate,
                edge: profile.cell_edge_rate,
            });
        }
    }
    Ok(out)
}

/// Runs the configured task. Only the rate task fills the rate summaries.
pub fn run_task(cfg: &RunConfig) -> Result<TaskOutput> {
    match cfg.task {
        Task::Coverage => Ok(TaskOutput {
            rows: coverage_rows(cfg)?,
            analytic_rates: None,
            sim_rates: None,
        }),
        Task::InverseSinr => Ok(TaskOutput {
            rows: inverse_sinr_rows(cfg)?,
            analytic_rates: None,
            sim_rates: None,
        }),
        Task::Rate => rate_rows(cfg, true),
        Task::Reproduce | Task::Compare => Err(Error::param(
            "task",
            format!("`{}` is not a single-curve task", cfg.task),
        )),
    }
}

/// `<stem>.json` next to a result file.
pub fn manifest_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn summary_json(s: Option<RateSummary>) -> Value {
    match s {
        Some(s) => serde_json::json!({ "mean_rate": s.mean, "cell_edge_rate": s.edge }),
        None => Value::Null,
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Removes files written by a run that later failed.
struct Outputs {
    written: Vec<PathBuf>,
    created_dir: Option<PathBuf>,
    keep: bool,
}

impl Outputs {
    fn new() -> Self {
        Self {
            written: Vec::new(),
            created_dir: None,
            keep: false,
        }
    }

    fn ensure_dir(&mut self, dir: &Path) -> Result<()> {
        if dir.as_os_str().is_empty() || dir.is_dir() {
            return Ok(());
        }
        fs::create_dir_all(dir)?;
        self.created_dir = Some(dir.to_path_buf());
        Ok(())
    }

    fn curve(&mut self, path: PathBuf, rows: &[CurveRow]) -> Result<()> {
        self.written.push(path.clone());
        write_curve_file(&path, rows)
    }

    fn json(&mut self, path: PathBuf, value: &Value) -> Result<()> {
        self.written.push(path.clone());
        write_json(&path, value)
    }

    fn finish(mut self) -> Vec<PathBuf> {
        self.keep = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if self.keep {
            return;
        }
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
        if let Some(d) = &self.created_dir {
            let _ = fs::remove_dir(d);
        }
    }
}

fn manifest_with(cfg: &RunConfig, extra: &[(&str, Value)]) -> Value {
    let mut m: Map<String, Value> = cfg.manifest();
    for (k, v) in extra {
        m.insert(k.to_string(), v.clone());
    }
    Value::Object(m)
}

/// Runs one task and writes `cfg.out` plus its manifest. The rate task also
/// records mean and cell-edge rates in the manifest under `results`.
pub fn run_to_file(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let output = run_task(cfg)?;
    let mut files = Outputs::new();
    if let Some(dir) = cfg.out.parent() {
        files.ensure_dir(dir)?;
    }
    files.curve(cfg.out.clone(), &output.rows)?;
    let mut extra = Vec::new();
    if cfg.task == Task::Rate {
        extra.push((
            RESULTS_KEY,
            serde_json::json!({
                "analytic": summary_json(output.analytic_rates),
                "sim": summary_json(output.sim_rates),
            }),
        ));
    }
    files.json(manifest_path(&cfg.out), &manifest_with(cfg, &extra))?;
    Ok(files.finish())
}

/// One row of the rate table: both links for full duplex, downlink only for
/// half duplex.
pub fn rate_table_row(job: &CurveJob) -> Result<RateRow> {
    let mut row = RateRow {
        label: job.name.clone(),
        analytic: RateCells::default(),
        sim: RateCells::default(),
    };
    let links: &[Link] = match job.config.duplex {
        Duplex::Fd => &[Link::Ul, Link::Dl],
        Duplex::Hd => &[Link::Dl],
    };
    for &link in links {
        let mut cfg = job.config.clone();
        cfg.link = link;
        cfg.rate_grid.clear();
        let out = rate_rows(&cfg, true)?;
        for (cells, s) in [(&mut row.analytic, out.analytic_rates), (&mut row.sim, out.sim_rates)] {
            if let Some(s) = s {
                match link {
                    Link::Ul => (cells.ul_mean, cells.ul_edge) = (Some(s.mean), Some(s.edge)),
                    Link::Dl => (cells.dl_mean, cells.dl_edge) = (Some(s.mean), Some(s.edge)),
                }
            }
        }
    }
    Ok(row)
}

/// Writes every curve of `figure` to `out_dir` as `<curve>.csv` with a
/// manifest beside it; the table becomes `table1.csv` with one manifest per
/// row. Nothing is left behind when any curve fails.
pub fn reproduce(figure: Figure, base: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let jobs = figure_jobs(figure, base)?;
    let mut files = Outputs::new();
    files.ensure_dir(out_dir)?;
    if figure == Figure::Table1 {
        let mut rows = Vec::with_capacity(jobs.len());
        for job in &jobs {
            rows.push(rate_table_row(job)?);
            let path = out_dir.join(format!("table1_{}.json", job.name));
            files.json(path, &manifest_with(&job.config, &[]))?;
        }
        let path = out_dir.join("table1.csv");
        files.written.push(path.clone());
        let mut buf = Vec::new();
        write_rate_table(&mut buf, &rows)?;
        fs::write(&path, buf)?;
    } else {
        for job in &jobs {
            let output = run_task(&job.config)?;
            let csv = out_dir.join(format!("{}.csv", job.name));
            files.curve(csv.clone(), &output.rows)?;
            files.json(manifest_path(&csv), &manifest_with(&job.config, &[]))?;
        }
    }
    Ok(files.finish())
}
