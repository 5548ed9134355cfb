//! Acceptance criteria, one PASS/FAIL line each. Runs sequentially so the
//! reported runtimes are not contended.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdcell::analytic::{
    cell_edge_rate, coverage, fd_dl_coverage, hd_dl_coverage, mean_rate, other_cell_exponent,
    same_cell_factor_closed, same_cell_factor_oracle, zeta, QuadratureSpec, SameCellMethod,
};
use fdcell::harness::config::{load_entries, Entry, Figure, Method, RunConfig};
use fdcell::harness::presets::{figure_jobs, CurveJob};
use fdcell::harness::reference;
use fdcell::harness::run::{coverage_rows, inverse_sinr_rows, manifest_path, run_to_file};
use fdcell::harness::table::read_curve_file;
use fdcell::montecarlo::{estimate_coverage, McConfig};
use fdcell::radio::{uplink_power, Duplex, Link};
use fdcell::scenario::{from_db, ScenarioParams};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn analytic_base() -> RunConfig {
    RunConfig {
        method: Method::Analytic,
        ..RunConfig::default()
    }
}

fn job(figure: Figure, name: &str, base: &RunConfig) -> CurveJob {
    figure_jobs(figure, base)
        .unwrap()
        .into_iter()
        .find(|j| j.name == name)
        .unwrap_or_else(|| panic!("no preset curve {name}"))
}

/// Largest |analytic - published| over a curve.
fn max_dev_against_reference(name: &str, rows: &[fdcell::harness::CurveRow]) -> f64 {
    let reference = reference::curve(name).unwrap().unwrap();
    assert_eq!(reference.len(), rows.len(), "{name}");
    rows.iter()
        .zip(&reference)
        .map(|(r, p)| {
            assert_eq!(r.x, p.x);
            (r.analytic.unwrap() - p.analytic.unwrap()).abs()
        })
        .fold(0.0, f64::max)
}

fn hd_downlink() -> Check {
    let j = job(Figure::Fig2, "fig2_hd", &analytic_base());
    let rows = coverage_rows(&j.config).map_err(|e| e.to_string())?;
    let at0 = rows.iter().find(|r| r.x == 0.0).unwrap().analytic.unwrap();
    let max = max_dev_against_reference("fig2_hd", &rows);
    ensure(
        (at0 - 0.50428).abs() <= 5e-4 && max <= 5e-3 && rows.len() == 17,
        format!("P(0 dB) = {at0:.6}, max |dev| = {max:.2e} over {} thresholds", rows.len()),
    )
}

fn fd_downlink() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["fig2_fd_eps0.2", "fig2_fd_eps0.8"] {
        let j = job(Figure::Fig2, name, &analytic_base());
        let rows = coverage_rows(&j.config).map_err(|e| e.to_string())?;
        let max = max_dev_against_reference(name, &rows);
        ok &= max <= 2e-3 && rows.len() == 17;
        detail.push(format!("{name}: max |dev| = {max:.2e}"));
    }
    ensure(ok, detail.join(", "))
}

fn fd_uplink() -> Check {
    let mut detail = Vec::new();
    let mut ok = true;
    for j in figure_jobs(Figure::Fig3, &analytic_base()).unwrap() {
        let rows = coverage_rows(&j.config).map_err(|e| e.to_string())?;
        let max = max_dev_against_reference(&j.name, &rows);
        ok &= max <= 1e-2 && rows.len() == 25;
        detail.push(format!("{}: {max:.2e}", j.name));
    }
    ensure(ok, format!("max |dev| {}", detail.join(", ")))
}

fn inverse_sinr() -> Check {
    let expected = [
        ("fig4_dl_r400_eps0.2", 42.4988),
        ("fig4_dl_r200_eps0.2", 36.4782),
        ("fig4_ul_r400_eps0.2", 139.304),
        ("fig4_ul_r400_eps0.8", 79.543),
        ("fig4_ul_r200_eps0.2", 135.691),
        ("fig4_ul_r200_eps0.8", 83.155),
    ];
    let mut worst: f64 = 0.0;
    for (name, want) in expected {
        let rows = inverse_sinr_rows(&job(Figure::Fig4, name, &analytic_base()).config).map_err(|e| e.to_string())?;
        let got = rows.iter().find(|r| r.x == 23.0).unwrap().analytic.unwrap();
        worst = worst.max((got - want).abs());
    }
    ensure(worst <= 0.01, format!("worst |dev| at P_d = 23 dBm: {worst:.2e} dB"))
}

fn rate_profile() -> Check {
    let jobs = figure_jobs(Figure::Table1, &analytic_base()).unwrap();
    let fd = &jobs.iter().find(|j| j.name == "fd_eps0.2_pd40").unwrap().config;
    let hd = &jobs.iter().find(|j| j.name == "hd").unwrap().config;
    let cov = |c: &RunConfig| {
        let c = c.clone();
        move |t: f64| coverage(Link::Dl, c.duplex, t, &c.scenario, &c.quad, c.same_cell)
    };
    let fd_mean = mean_rate(cov(fd), Duplex::Fd, &fd.quad).map_err(|e| e.to_string())?;
    let hd_mean = mean_rate(cov(hd), Duplex::Hd, &hd.quad).map_err(|e| e.to_string())?;
    let hd_edge = cell_edge_rate(cov(hd), Duplex::Hd).map_err(|e| e.to_string())?;
    ensure(
        (hd_mean - 2.02).abs() <= 0.05 && (fd_mean - 4.04).abs() <= 0.10 && (hd_edge - 0.0062).abs() <= 0.001,
        format!("HD mean {hd_mean:.4}, FD (0.2, 40) mean {fd_mean:.4}, HD edge {hd_edge:.5}"),
    )
}

fn monte_carlo() -> Check {
    let mc = McConfig::new(10_000, 1);
    let hd = job(Figure::Fig2, "fig2_hd", &RunConfig::default()).config;
    let p_hd = estimate_coverage(&hd.scenario, Link::Dl, Duplex::Hd, &[0.0], &mc).map_err(|e| e.to_string())?;
    let ul = job(Figure::Fig3, "fig3_eps0.8_pd23", &RunConfig::default()).config;
    let p_ul = estimate_coverage(&ul.scenario, Link::Ul, Duplex::Fd, &[-20.0], &mc).map_err(|e| e.to_string())?;
    let (a, b) = (p_hd.probability[0], p_ul.probability[0]);
    ensure(
        (0.55..=0.63).contains(&a) && (0.62..=0.70).contains(&b),
        format!("HD DL at 0 dB = {a:.4} (±{:.4}), FD UL (0.8, 23) at -20 dB = {b:.4} (±{:.4})",
            p_hd.ci_half_width[0], p_ul.ci_half_width[0]),
    )
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    return (x, 2.0 / ((1.0 - x * x) * dp * dp));
                }
            }
        })
        .collect()
}

/// Nodes and weights of a composite rule over consecutive breakpoints.
fn composite(breaks: &[f64], rule: &[(f64, f64)]) -> Vec<(f64, f64)> {
    breaks
        .windows(2)
        .flat_map(|w| {
            let (mid, half) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
            rule.iter().map(move |&(x, wt)| (mid + half * x, half * wt))
        })
        .collect()
}

/// Full-duplex downlink coverage by plain triple quadrature over serving
/// distance, uplink-user distance and angle, using nothing from the crate
/// but parameter accessors.
fn triple_reference(t: f64, s: &ScenarioParams) -> f64 {
    let rule = gauss_legendre(12);
    let r_c = s.r_c();
    let uniform: Vec<f64> = (0..=40).map(|i| r_c * i as f64 / 40.0).collect();
    let mut angles = vec![0.0];
    angles.extend((0..24).map(|i| PI * 2f64.powi(i - 23)));
    let r_nodes = composite(&uniform, &rule);
    let g_nodes = composite(&angles, &rule);
    let cos_g: Vec<(f64, f64)> = g_nodes.iter().map(|&(g, w)| (g.cos(), w)).collect();
    let (p_0, p_d, eps, lambda) = (s.p_0(), s.p_d(), s.epsilon(), s.lambda_bs());
    let mut total = 0.0;
    for &(r_d, w_d) in &r_nodes {
        let other = (-(PI * PI / 2.0) * lambda * r_d * r_d * t.sqrt()).exp();
        let mut inner = 0.0;
        for &(r_u, w_u) in &r_nodes {
            let k = t * p_0 * r_u.powf(4.0 * eps) * r_d.powi(4) / p_d;
            let mut ang = 0.0;
            for &(c, w_g) in &cos_g {
                let d2 = r_d * r_d + r_u * r_u - 2.0 * r_d * r_u * c;
                ang += w_g * d2 * d2 / (d2 * d2 + k);
            }
            inner += w_u * (2.0 * r_u / (r_c * r_c)) * ang / PI;
        }
        total += w_d * (2.0 * r_d / (r_c * r_c)) * other * inner;
    }
    total
}

fn oracle_equivalence() -> Check {
    let spec = QuadratureSpec::default();
    let base = job(Figure::Fig2, "fig2_hd", &RunConfig::default()).config.scenario;
    let r_c = base.r_c();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut accepted, mut drawn, mut worst) = (0, 0u64, 0.0f64);
    while accepted < 1000 {
        drawn += 1;
        if drawn > 10_000_000 {
            return Err(format!("only {accepted} valid tuples in {drawn} draws"));
        }
        let t = from_db(rng.random_range(-40.0..40.0));
        let r_d = rng.random_range(0.0..r_c);
        let r_u = rng.random_range(0.0..r_c);
        let eps: f64 = rng.random_range(0.0..=1.0);
        let s = base.to_builder().epsilon(eps).build().unwrap();
        if !zeta(t, r_d, r_u, &s).trusted() {
            continue;
        }
        let closed = same_cell_factor_closed(t, r_d, r_u, &s).expect("trusted tuples evaluate");
        let oracle = same_cell_factor_oracle(t, r_d, r_u, &s, &spec).map_err(|e| e.to_string())?;
        worst = worst.max((closed - oracle).abs() / oracle.abs());
        accepted += 1;
    }
    let mut detail = format!("closed vs oracle worst rel. dev {worst:.2e} over 1000 valid tuples ({drawn} drawn)");
    let mut ok = worst <= 0.02;

    let mut worst_cov: f64 = 0.0;
    let mut fallback_cases = 0;
    for eps in [0.2, 0.8, 1.0] {
        let s = base.to_builder().epsilon(eps).build().unwrap();
        for t_db in [-10.0, 0.0, 10.0, 20.0] {
            let t = from_db(t_db);
            let grid: Vec<f64> = (1..50).map(|i| r_c * i as f64 / 50.0).collect();
            if grid.iter().any(|&a| grid.iter().any(|&b| a != b && !zeta(t, a, b, &s).trusted())) {
                fallback_cases += 1;
            }
            let got = fd_dl_coverage(t, &s, &spec, SameCellMethod::ClosedWithFallback).map_err(|e| e.to_string())?;
            worst_cov = worst_cov.max((got - triple_reference(t, &s)).abs());
        }
    }
    ok &= worst_cov <= 2e-3 && fallback_cases > 0;
    detail.push_str(&format!(
        "; coverage vs triple quadrature worst |dev| {worst_cov:.2e} over 12 cases ({fallback_cases} needing fallback)"
    ));
    ensure(ok, detail)
}

fn nonincreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0]) && v.iter().all(|p| (0.0..=1.0).contains(p))
}

fn invariants() -> Check {
    let spec = QuadratureSpec::default();
    let s = job(Figure::Fig2, "fig2_fd_eps0.8", &RunConfig::default()).config.scenario;
    let grid: Vec<f64> = (-8..=8).map(|i| 5.0 * i as f64).collect();
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };

    let analytic = |link, duplex, method| -> Vec<f64> {
        grid.iter()
            .map(|&t| coverage(link, duplex, from_db(t), &s, &spec, method).unwrap())
            .collect()
    };
    let hd = analytic(Link::Dl, Duplex::Hd, SameCellMethod::Oracle);
    let fd = analytic(Link::Dl, Duplex::Fd, SameCellMethod::Oracle);
    let fd_closed = analytic(Link::Dl, Duplex::Fd, SameCellMethod::ClosedWithFallback);
    let ul = analytic(Link::Ul, Duplex::Fd, SameCellMethod::Oracle);
    check(nonincreasing(&hd) && nonincreasing(&fd) && nonincreasing(&fd_closed) && nonincreasing(&ul), "analytic monotonicity/range");
    check(fd.iter().zip(&hd).all(|(f, h)| f <= h), "analytic FD <= HD");

    let mc = McConfig::new(2000, 11);
    let sim = |link, duplex| estimate_coverage(&s, link, duplex, &grid, &mc).unwrap().probability;
    let (sim_hd, sim_fd, sim_ul) = (sim(Link::Dl, Duplex::Hd), sim(Link::Dl, Duplex::Fd), sim(Link::Ul, Duplex::Fd));
    check(nonincreasing(&sim_hd) && nonincreasing(&sim_fd) && nonincreasing(&sim_ul), "simulated monotonicity/range");
    check(sim_fd.iter().zip(&sim_hd).all(|(f, h)| f <= h), "simulated FD <= HD");

    let capped = s.to_builder().p_max_u_dbm(-20.0).build().unwrap();
    let powers: Vec<f64> = (0..=200).map(|i| uplink_power(i as f64, &capped)).collect();
    check(
        powers.windows(2).all(|w| w[1] >= w[0]) && powers.iter().all(|&p| p <= capped.p_max_u()) && powers[200] == capped.p_max_u(),
        "power control cap/monotonicity",
    );

    let mut identity: f64 = 0.0;
    for alpha in [4.0, 3.5, 5.0] {
        let sa = s.to_builder().alpha(alpha).build().unwrap();
        for &r in &[1.0f64, 37.0, 150.0] {
            for &t_db in &[-30.0, 0.0, 25.0] {
                let t: f64 = from_db(t_db);
                let literal = 2.0 * PI * PI * sa.lambda_bs() * t / (2.0 * PI / alpha).sin()
                    * r.powf(alpha) * (r.powf(-alpha) / t).powf((alpha - 2.0) / alpha) / alpha;
                let lib = other_cell_exponent(r, t, &sa).unwrap();
                identity = identity.max((lib - literal).abs() / literal);
                if alpha == 4.0 {
                    let simple = PI * PI / 2.0 * sa.lambda_bs() * r * r * t.sqrt();
                    identity = identity.max((simple - literal).abs() / literal);
                }
            }
        }
    }
    check(identity <= 1e-12, "alpha = 4 simplification identity");

    let scaled: Vec<f64> = [50.0, 200.0, 800.0]
        .iter()
        .map(|&r| {
            let sr = ScenarioParams::builder().cluster_radius(r).coupled_density().build().unwrap();
            hd_dl_coverage(1.0, &sr, &spec).unwrap()
        })
        .collect();
    check(scaled.iter().all(|p| (p - scaled[0]).abs() <= 1e-9), "HD scale invariance");

    let small = McConfig::new(500, 3);
    let a = estimate_coverage(&s, Link::Ul, Duplex::Fd, &grid, &small.with_workers(1)).unwrap();
    let b = estimate_coverage(&s, Link::Ul, Duplex::Fd, &grid, &small.with_workers(3)).unwrap();
    let c = estimate_coverage(&s, Link::Ul, Duplex::Fd, &grid, &McConfig::new(500, 4)).unwrap();
    check(a.probability == b.probability && a.probability != c.probability, "seed/worker determinism");

    check(round_trip().is_ok(), "CSV/manifest round trip");
    ensure(
        failures.is_empty(),
        if failures.is_empty() {
            "monotonicity, range, FD <= HD, power cap, alpha = 4 identity, scale invariance, determinism, round trips".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

/// A simulated curve re-run from its manifest alone is byte-identical.
fn round_trip() -> std::result::Result<(), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = dir.path().join("first.csv");
    let entries = [
        Entry::new("method", "both"),
        Entry::new("duplex", "fd"),
        Entry::new("n_drops", "300"),
        Entry::new("seed", "99"),
        Entry::new("epsilon", "0.35"),
        Entry::new("out", first.display().to_string()),
    ];
    let cfg = RunConfig::from_entries(&entries).map_err(|e| e.to_string())?;
    run_to_file(&cfg).map_err(|e| e.to_string())?;
    let rows = read_curve_file(&first).map_err(|e| e.to_string())?;
    let manifest = std::fs::read_to_string(manifest_path(&first)).map_err(|e| e.to_string())?;
    let mut again = load_entries(&manifest).map_err(|e| e.to_string())?;
    let second = dir.path().join("second.csv");
    again.push(Entry::new("out", second.display().to_string()));
    let cfg2 = RunConfig::from_entries(&again).map_err(|e| e.to_string())?;
    run_to_file(&cfg2).map_err(|e| e.to_string())?;
    let same = std::fs::read(&first).unwrap() == std::fs::read(&second).unwrap();
    let reparsed = rows.len() == cfg.thresholds_db.len() && rows.iter().all(|r| r.sim.is_some());
    if same && reparsed && Path::new(&second).exists() {
        Ok(())
    } else {
        Err("outputs differ".into())
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("HD downlink coverage", Duration::from_secs(1), hd_downlink),
        ("FD downlink coverage", Duration::from_secs(30), fd_downlink),
        ("FD uplink coverage", Duration::from_secs(10), fd_uplink),
        ("inverse-SINR bounds", Duration::from_secs(1), inverse_sinr),
        ("rate profile", Duration::from_secs(30), rate_profile),
        ("Monte Carlo vs published simulation", Duration::from_secs(300), monte_carlo),
        ("closed form vs oracle", Duration::from_secs(600), oracle_equivalence),
        ("invariant suites", Duration::from_secs(600), invariants),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let (pass, detail) = match result {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {detail}; {:.2} s (budget {} s){}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" },
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
