use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdcell::error::{Error, Result};
use fdcell::harness::compare::{compare_curves, Column, ComparisonReport};
use fdcell::harness::config::{load_entries, merge_entries, parse_override, Entry, Figure, RunConfig, KEYS};
use fdcell::harness::reference;
use fdcell::harness::run::{reproduce, run_to_file};
use fdcell::harness::table::read_curve_file;

/// Coverage, inverse-SINR and rate analysis of full-duplex small cells.
#[derive(Parser)]
#[command(name = "fdcell", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage probability against SINR threshold.
    Coverage(Common),
    /// Average inverse SINR against downlink transmit power.
    InverseSinr(Common),
    /// Rate distribution, mean and cell-edge rate.
    Rate(Common),
    /// Recompute every curve of a published figure or table.
    Reproduce {
        /// fig2, fig3, fig4, fig5 or table1.
        figure: Figure,
        #[command(flatten)]
        common: Common,
    },
    /// Compare two curve files point by point.
    Compare(CompareArgs),
    /// List configuration keys with their defaults.
    Keys,
}

#[derive(Args)]
struct Common {
    /// `key = value` file or a manifest written by an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of Monte Carlo drops.
    #[arg(long)]
    drops: Option<u64>,
    /// Output CSV (a directory for `reproduce`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// analytic, sim or both.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    link: Option<String>,
    #[arg(long)]
    duplex: Option<String>,
    /// Worker threads for the simulator.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Curve file.
    a: PathBuf,
    /// Curve file, or `ref:<name>` for a shipped reference curve.
    b: String,
    /// Largest absolute deviation allowed per point.
    #[arg(long)]
    tol: f64,
    #[arg(long, default_value = "auto")]
    column_a: Column,
    #[arg(long, default_value = "auto")]
    column_b: Column,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

impl Common {
    fn resolve(&self, task: &str) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => load_entries(&fs::read_to_string(path)?)?,
            None => Vec::new(),
        };
        let mut overrides = self.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>()?;
        let mut flag = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                overrides.push(Entry::new(key, v));
            }
        };
        flag("seed", self.seed.map(|v| v.to_string()));
        flag("n_drops", self.drops.map(|v| v.to_string()));
        flag("out", self.out.as_ref().map(|p| p.display().to_string()));
        flag("method", self.method.clone());
        flag("link", self.link.clone());
        flag("duplex", self.duplex.clone());
        flag("workers", self.workers.map(|v| v.to_string()));
        flag("task", Some(task.to_string()));
        RunConfig::from_entries(&merge_entries(base, &overrides))
    }
}

enum Outcome {
    Done,
    CompareFailed,
}

fn compare(args: &CompareArgs) -> Result<Outcome> {
    let a = read_curve_file(&args.a)?;
    let b = match args.b.strip_prefix("ref:") {
        Some(name) => reference::curve(name)
            .ok_or_else(|| Error::InvalidParameter {
                name: "b",
                reason: format!("no shipped reference curve `{name}`"),
            })??,
        None => read_curve_file(&PathBuf::from(&args.b))?,
    };
    let report: ComparisonReport = compare_curves(&a, &b, args.column_a, args.column_b, args.tol)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &args.report {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    eprintln!(
        "{}: max |dev| {:.3e} against tol {:.3e}",
        if report.pass { "pass" } else { "fail" },
        report.max_abs_dev,
        report.tol
    );
    Ok(if report.pass { Outcome::Done } else { Outcome::CompareFailed })
}

fn list_written(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Coverage(c) => list_written(&run_to_file(&c.resolve("coverage")?)?),
        Command::InverseSinr(c) => list_written(&run_to_file(&c.resolve("inverse-sinr")?)?),
        Command::Rate(c) => list_written(&run_to_file(&c.resolve("rate")?)?),
        Command::Reproduce { figure, common } => {
            let cfg = common.resolve("reproduce")?;
            list_written(&reproduce(figure, &cfg, &cfg.out)?);
        }
        Command::Compare(args) => return compare(&args),
        Command::Keys => {
            let mut out = std::io::stdout().lock();
            for (key, description, default) in KEYS {
                if writeln!(out, "{key:<18} {default:<12} {description}").is_err() {
                    break;
                }
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::CompareFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
