//! Line-based `key = value` run configuration.
//!
//! Everything after `#` on a line is ignored. Unknown keys, malformed values
//! and out-of-range parameters are all collected and reported together with
//! their line numbers; a configuration with any issue is rejected whole.
//! Command-line overrides are applied as entries without a line number and
//! replace file entries of the same key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::analytic::{QuadratureSpec, SameCellMethod};
use crate::error::{ConfigIssue, Error, Result};
use crate::montecarlo::McConfig;
use crate::radio::{Duplex, Link};
use crate::scenario::{PowerUnit, PowerUnitConvention, ScenarioBuilder, ScenarioParams};

/// Version recorded in every manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

macro_rules! keyword_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                match s.trim() {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(
                        "unknown value `{other}` (expected one of: {})",
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

keyword_enum!(Task {
    Coverage => "coverage",
    InverseSinr => "inverse-sinr",
    Rate => "rate",
    Reproduce => "reproduce",
    Compare => "compare",
});

keyword_enum!(
    /// Which estimators fill a curve.
    Method {
        Sim => "sim",
        Analytic => "analytic",
        Both => "both",
    }
);

keyword_enum!(Figure {
    Fig2 => "fig2",
    Fig3 => "fig3",
    Fig4 => "fig4",
    Fig5 => "fig5",
    Table1 => "table1",
});

impl Method {
    pub fn wants_sim(self) -> bool {
        matches!(self, Method::Sim | Method::Both)
    }

    pub fn wants_analytic(self) -> bool {
        matches!(self, Method::Analytic | Method::Both)
    }
}

/// One `key = value` assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    /// Source line, `None` for overrides.
    pub line: Option<usize>,
}

impl Entry {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            value: value.into(),
            line: None,
        }
    }
}

/// Accepted keys with a one-line description and the default.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("alpha", "path-loss exponent, > 2", "4"),
    ("inter_bs_distance", "m; sets r_c to half of it and couples lambda_bs", "400"),
    ("r_c", "cluster radius in m (conflicts with inter_bs_distance)", "200"),
    ("lambda_bs", "BS density per m^2", "1/(pi r_c^2)"),
    ("p_d_dbm", "BS transmit power in dBm", "40"),
    ("p_d", "BS transmit power, linear in p_d_unit", "-"),
    ("p_0_dbm", "power-control baseline in dBm", "-64"),
    ("p_0", "power-control baseline, linear in p0_unit", "-"),
    ("p_max_u_dbm", "uplink power ceiling in dBm (always mW)", "23"),
    ("p_max_u", "uplink power ceiling in mW", "-"),
    ("p0_unit", "unit of the dBm baseline: mw or w", "mw"),
    ("p_d_unit", "unit of the dBm BS power: mw or w", "mw"),
    ("epsilon", "fractional power-control factor in [0, 1]", "0.2"),
    ("sigma2", "noise power, linear", "0"),
    ("window_len", "side of the simulation window in m", "10000"),
    ("task", "coverage | inverse-sinr | rate | reproduce | compare", "coverage"),
    ("link", "dl | ul", "dl"),
    ("duplex", "hd | fd", "fd"),
    ("method", "sim | analytic | both", "both"),
    ("thresholds", "SINR thresholds in dB", "-40:5:40"),
    ("pd_grid", "BS powers in dBm for inverse-sinr sweeps", "23:1:40"),
    ("rate_grid", "rates in bps/Hz for rate CDFs", "0:1:15"),
    ("n_drops", "Monte Carlo drops, >= 1", "10000"),
    ("seed", "master seed", "1"),
    ("workers", "worker threads or auto", "auto"),
    ("out", "output file (single tasks) or directory (reproduce)", "out"),
    ("same_cell", "closed | oracle", "closed"),
    ("other_cell_ul", "simulate other-cell uplink interferers: true | false", "true"),
    ("rel_tol", "quadrature relative tolerance", "1e-8"),
    ("abs_tol", "quadrature absolute tolerance", "1e-12"),
    ("max_depth", "quadrature bisection depth", "40"),
    ("figure", "fig2 | fig3 | fig4 | fig5 | table1", "-"),
    ("curve", "curve label (informational)", "-"),
    ("version", "artifact version (informational)", "-"),
];

const SCENARIO_KEYS: &[&str] = &[
    "alpha",
    "inter_bs_distance",
    "r_c",
    "lambda_bs",
    "p_d_dbm",
    "p_d",
    "p_0_dbm",
    "p_0",
    "p_max_u_dbm",
    "p_max_u",
    "p0_unit",
    "p_d_unit",
    "epsilon",
    "sigma2",
    "window_len",
];

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: ScenarioParams,
    pub task: Task,
    pub link: Link,
    pub duplex: Duplex,
    pub method: Method,
    pub thresholds_db: Vec<f64>,
    pub pd_grid_dbm: Vec<f64>,
    pub rate_grid: Vec<f64>,
    pub n_drops: u64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: PathBuf,
    pub same_cell: SameCellMethod,
    pub other_cell_ul: bool,
    pub quad: QuadratureSpec,
    pub figure: Option<Figure>,
    pub curve: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_entries(&[]).expect("defaults are valid")
    }
}

/// Splits a document into entries. Syntax errors and duplicate keys are
/// collected rather than returned one at a time.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::new();
    let mut issues = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            issues.push(ConfigIssue {
                line: Some(line),
                key: content.to_string(),
                reason: "expected `key = value`".into(),
            });
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if let Some(first) = seen.insert(key.to_string(), line) {
            issues.push(ConfigIssue {
                line: Some(line),
                key: key.to_string(),
                reason: format!("already set on line {first}"),
            });
            continue;
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line: Some(line),
        });
    }
    if issues.is_empty() {
        Ok(entries)
    } else {
        Err(Error::Config(issues))
    }
}

/// Parses a configuration document into a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::from_entries(&parse_entries(text)?)
}

/// Reads either a `key = value` file or a JSON manifest.
pub fn load_entries(text: &str) -> Result<Vec<Entry>> {
    if text.trim_start().starts_with('{') {
        entries_from_manifest(text)
    } else {
        parse_entries(text)
    }
}

/// Key under which a manifest records results; it is not configuration.
pub const RESULTS_KEY: &str = "results";

/// Entries of a flat JSON manifest; numbers, strings and booleans only.
pub fn entries_from_manifest(text: &str) -> Result<Vec<Entry>> {
    let map: Map<String, Value> = serde_json::from_str(text)?;
    let mut entries = Vec::with_capacity(map.len());
    let mut issues = Vec::new();
    for (key, value) in map.into_iter().filter(|(k, _)| k != RESULTS_KEY) {
        let value = match value {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            other => {
                issues.push(ConfigIssue {
                    line: None,
                    key,
                    reason: format!("expected a scalar, found {other}"),
                });
                continue;
            }
        };
        entries.push(Entry::new(key, value));
    }
    if issues.is_empty() {
        Ok(entries)
    } else {
        Err(Error::Config(issues))
    }
}

/// `base` with every key in `overrides` replaced or appended.
pub fn merge_entries(base: Vec<Entry>, overrides: &[Entry]) -> Vec<Entry> {
    let mut merged: Vec<Entry> = base
        .into_iter()
        .filter(|e| !overrides.iter().any(|o| o.key == e.key))
        .collect();
    merged.extend(overrides.iter().cloned());
    merged
}

/// Parses a `key=value` command-line override.
pub fn parse_override(text: &str) -> Result<Entry> {
    match text.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok(Entry::new(k.trim(), v.trim())),
        _ => Err(Error::Config(vec![ConfigIssue {
            line: None,
            key: text.to_string(),
            reason: "override must look like key=value".into(),
        }])),
    }
}

/// Parses a grid: comma-separated items, each a number or an inclusive
/// `start:step:stop` range.
pub fn parse_grid(text: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim) {
        if item.is_empty() {
            return Err("empty grid item".into());
        }
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [x] => out.push(parse_f64(x)?),
            [start, step, stop] => {
                let (start, step, stop) = (parse_f64(start)?, parse_f64(step)?, parse_f64(stop)?);
                if !(step > 0.0) {
                    return Err(format!("range step {step} must be positive"));
                }
                let n = ((stop - start) / step).round();
                if !(n >= 0.0) || n > 1e6 {
                    return Err(format!("range {item} is empty or too long"));
                }
                if (start + n * step - stop).abs() > 1e-9 * stop.abs().max(1.0) {
                    return Err(format!("range {item} does not end on its stop value"));
                }
                out.extend((0..=n as usize).map(|i| start + i as f64 * step));
            }
            _ => return Err(format!("cannot read grid item `{item}`")),
        }
    }
    if out.windows(2).any(|w| !(w[0] < w[1])) {
        return Err("grid must be strictly increasing".into());
    }
    Ok(out)
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

/// Canonical text for a grid; floats print in shortest round-trip form.
pub fn format_grid(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Collects issues while reading entries.
struct Reader<'a> {
    entries: BTreeMap<&'a str, &'a Entry>,
    issues: Vec<ConfigIssue>,
}

impl<'a> Reader<'a> {
    fn issue(&mut self, key: &str, reason: impl Into<String>) {
        let line = self.entries.get(key).and_then(|e| e.line);
        self.issues.push(ConfigIssue {
            line,
            key: key.to_string(),
            reason: reason.into(),
        });
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Parsed value of `key`, `None` when absent or malformed.
    fn get<T>(&mut self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Option<T> {
        let entry = *self.entries.get(key)?;
        match parse(&entry.value) {
            Ok(v) => Some(v),
            Err(reason) => {
                self.issue(key, reason);
                None
            }
        }
    }

    fn parsed<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        self.get(key, |s| s.trim().parse::<T>().map_err(|e| e.to_string()))
    }
}

impl RunConfig {
    /// Resolves entries over the defaults. Later entries with the same key
    /// are expected to have been merged away already.
    pub fn from_entries(entries: &[Entry]) -> Result<Self> {
        let mut r = Reader {
            entries: entries.iter().map(|e| (e.key.as_str(), e)).collect(),
            issues: Vec::new(),
        };
        let known: Vec<&str> = KEYS.iter().map(|k| k.0).collect();
        for e in entries {
            if !known.contains(&e.key.as_str()) {
                r.issues.push(ConfigIssue {
                    line: e.line,
                    key: e.key.clone(),
                    reason: "unknown key".into(),
                });
            }
        }

        let scenario = resolve_scenario(&mut r);

        let task = r.parsed::<Task>("task").unwrap_or(Task::Coverage);
        let link = r.parsed::<Link>("link").unwrap_or(Link::Dl);
        let duplex = r.parsed::<Duplex>("duplex").unwrap_or(Duplex::Fd);
        let method = r.parsed::<Method>("method").unwrap_or(Method::Both);
        let thresholds_db = r.get("thresholds", parse_grid).unwrap_or_else(|| parse_grid("-40:5:40").unwrap());
        let pd_grid_dbm = r.get("pd_grid", parse_grid).unwrap_or_else(|| parse_grid("23:1:40").unwrap());
        let rate_grid = r.get("rate_grid", parse_grid).unwrap_or_else(|| parse_grid("0:1:15").unwrap());
        if rate_grid.first().is_some_and(|&c| c < 0.0) {
            r.issue("rate_grid", "rates must be non-negative");
        }
        let n_drops = r.parsed::<u64>("n_drops").unwrap_or(10_000);
        if n_drops == 0 {
            r.issue("n_drops", "must be at least 1");
        }
        let seed = r.parsed::<u64>("seed").unwrap_or(1);
        let workers = r
            .get("workers", |s| match s {
                "auto" => Ok(None),
                n => match n.parse::<usize>() {
                    Ok(0) | Err(_) => Err(format!("`{n}` is neither auto nor a positive count")),
                    Ok(k) => Ok(Some(k)),
                },
            })
            .flatten();
        let out = r.get("out", |s| Ok(PathBuf::from(s))).unwrap_or_else(|| PathBuf::from("out"));
        let same_cell = r.parsed::<SameCellMethod>("same_cell").unwrap_or_default();
        let other_cell_ul = r.get("other_cell_ul", parse_bool).unwrap_or(true);
        let defaults = QuadratureSpec::default();
        let rel_tol = r.get("rel_tol", parse_f64).unwrap_or(defaults.rel_tol);
        let abs_tol = r.get("abs_tol", parse_f64).unwrap_or(defaults.abs_tol);
        let max_depth = r.parsed::<u32>("max_depth").unwrap_or(defaults.max_depth);
        let quad = match QuadratureSpec::new(rel_tol, abs_tol, max_depth) {
            Ok(q) => q,
            Err(Error::InvalidParameter { name, reason }) => {
                r.issue(name, reason);
                defaults
            }
            Err(e) => return Err(e),
        };
        let figure = r.parsed::<Figure>("figure");
        let curve = r.get("curve", |s| Ok(s.to_string()));
        let _ = r.get("version", |s| Ok(s.to_string()));

        if !r.issues.is_empty() {
            return Err(Error::Config(r.issues));
        }
        Ok(RunConfig {
            scenario: scenario.expect("scenario resolves when no issues were found"),
            task,
            link,
            duplex,
            method,
            thresholds_db,
            pd_grid_dbm,
            rate_grid,
            n_drops,
            seed,
            workers,
            out,
            same_cell,
            other_cell_ul,
            quad,
            figure,
            curve,
        })
    }

    /// Drop count, seed and worker settings for the simulator.
    pub fn mc(&self) -> McConfig {
        McConfig {
            n_drops: self.n_drops,
            seed: self.seed,
            workers: self.workers,
            other_cell_ul: self.other_cell_ul,
        }
    }

    /// Every result-affecting setting as a flat JSON object. Reading it back
    /// with [`entries_from_manifest`] reproduces this configuration exactly.
    pub fn manifest(&self) -> Map<String, Value> {
        let s = &self.scenario;
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        put("version", VERSION.into());
        if let Some(f) = self.figure {
            put("figure", f.as_str().into());
        }
        if let Some(c) = &self.curve {
            put("curve", c.clone().into());
        }
        put("task", self.task.as_str().into());
        put("link", self.link.as_str().into());
        put("duplex", self.duplex.as_str().into());
        put("method", self.method.as_str().into());
        put("thresholds", format_grid(&self.thresholds_db).into());
        put("pd_grid", format_grid(&self.pd_grid_dbm).into());
        put("rate_grid", format_grid(&self.rate_grid).into());
        put("n_drops", self.n_drops.into());
        put("seed", self.seed.into());
        put("same_cell", self.same_cell.as_str().into());
        put("other_cell_ul", self.other_cell_ul.into());
        put("rel_tol", self.quad.rel_tol.into());
        put("abs_tol", self.quad.abs_tol.into());
        put("max_depth", self.quad.max_depth.into());
        put("alpha", s.alpha().into());
        put("r_c", s.r_c().into());
        put("lambda_bs", s.lambda_bs().into());
        put("p_d", s.p_d().into());
        put("p_0", s.p_0().into());
        put("p_max_u", s.p_max_u().into());
        put("p0_unit", short_unit(s.units().p0_unit).into());
        put("p_d_unit", short_unit(s.units().p_d_unit).into());
        put("epsilon", s.epsilon().into());
        put("sigma2", s.sigma2().into());
        put("window_len", s.window_len().into());
        m
    }
}

fn short_unit(u: PowerUnit) -> &'static str {
    match u {
        PowerUnit::Milliwatt => "mw",
        PowerUnit::Watt => "w",
    }
}

/// Applies one scenario key to a builder; `None` when its value is malformed
/// (the issue is already recorded).
fn apply_scenario_key(r: &mut Reader, key: &str, b: ScenarioBuilder) -> Option<ScenarioBuilder> {
    let num = |r: &mut Reader| r.get(key, parse_f64);
    Some(match key {
        "alpha" => b.alpha(num(r)?),
        "inter_bs_distance" => b.inter_bs_distance(num(r)?),
        "r_c" => b.cluster_radius(num(r)?),
        "lambda_bs" => b.lambda_bs(num(r)?),
        "p_d_dbm" => b.p_d_dbm(num(r)?),
        "p_d" => b.p_d_linear(num(r)?),
        "p_0_dbm" => b.p_0_dbm(num(r)?),
        "p_0" => b.p_0_linear(num(r)?),
        "p_max_u_dbm" => b.p_max_u_dbm(num(r)?),
        "p_max_u" => b.p_max_u_linear(num(r)?),
        "epsilon" => b.epsilon(num(r)?),
        "sigma2" => b.sigma2(num(r)?),
        "window_len" => b.window_len(num(r)?),
        // units are applied up front
        "p0_unit" | "p_d_unit" => b,
        _ => unreachable!("not a scenario key: {key}"),
    })
}

fn resolve_scenario(r: &mut Reader) -> Option<ScenarioParams> {
    let before = r.issues.len();
    let mut units = PowerUnitConvention::MILLIWATT;
    if let Some(u) = r.parsed::<PowerUnit>("p0_unit") {
        units.p0_unit = u;
    }
    if let Some(u) = r.parsed::<PowerUnit>("p_d_unit") {
        units.p_d_unit = u;
    }
    for (a, b) in [("inter_bs_distance", "r_c"), ("p_d_dbm", "p_d"), ("p_0_dbm", "p_0"), ("p_max_u_dbm", "p_max_u")] {
        if r.has(a) && r.has(b) {
            r.issue(b, format!("conflicts with `{a}`; set only one"));
        }
    }
    let base = ScenarioParams::builder().units(units);
    // each key alone over the defaults, so every range violation is named
    let present: Vec<&str> = SCENARIO_KEYS.iter().copied().filter(|k| r.has(k)).collect();
    let mut full = Some(base.clone());
    for key in &present {
        let Some(single) = apply_scenario_key(r, key, base.clone()) else {
            full = None;
            continue;
        };
        if let Err(Error::InvalidParameter { reason, .. }) = single.build() {
            r.issue(key, reason);
        }
    }
    if r.issues.len() > before {
        return None;
    }
    // inter-BS distance first so an explicit density survives it
    let mut order = present.clone();
    order.sort_by_key(|k| *k != "inter_bs_distance");
    for key in order {
        full = apply_scenario_key(r, key, full?);
    }
    match full?.build() {
        Ok(p) => Some(p),
        Err(Error::InvalidParameter { name, reason }) => {
            r.issue(name, reason);
            None
        }
        Err(e) => {
            r.issue("scenario", e.to_string());
            None
        }
    }
}
