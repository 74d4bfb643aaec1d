//! Configuration, CSV/SVG output and the `spinboson` command line.

pub mod config;
pub mod csv;
pub mod figures;
pub mod svg;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::correlations::Side;
use crate::error::{Error, Result};
use crate::experiments::{run_audits, run_sweep, AuditOutcome, Measure, Pipeline, SweepOptions};
use config::RunConfig;
use figures::{figure_spec, OVERLAYS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spinboson", version, about = "Quantum and classical correlations of two spins in independent bosonic reservoirs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep a configured scenario and write its CSV (and SVG with --svg).
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Also render the 2x2 panel plot.
        #[arg(long)]
        svg: bool,
    },
    /// Run every enabled audit; exit 0 iff all pass.
    Audit {
        #[arg(required_unless_present = "figure", conflicts_with = "figure")]
        config: Option<PathBuf>,
        /// Audit a built-in figure scenario (both overlays) instead of a config.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        figure: Option<u8>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write the four built-in figure datasets and plots.
    Figures {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Brute-force-only sweep; CSV to stdout unless --out is given.
    Oracle {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Debug, Args, Default)]
struct Overrides {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Measurement-angle grid points per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Zoom-in refinement rounds.
    #[arg(long)]
    refine: Option<usize>,
    /// Measured subsystem.
    #[arg(long, value_parser = parse_side)]
    side: Option<Side>,
    #[arg(long, value_parser = parse_pipeline)]
    pipeline: Option<Pipeline>,
}

fn parse_side(s: &str) -> std::result::Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pipeline(s: &str) -> std::result::Result<Pipeline, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if let Some(r) = self.refine {
            cfg.refine = r;
        }
        if let Some(s) = self.side {
            cfg.side = s;
        }
        if let Some(p) = self.pipeline {
            cfg.pipeline = p;
        }
        cfg.validate()
    }

    fn options(&self) -> Result<SweepOptions> {
        let grid = self.grid.unwrap_or(64);
        if grid < 2 {
            return Err(Error::Config(format!("grid: must be >= 2, got {grid}")));
        }
        Ok(SweepOptions {
            optimizer: crate::correlations::OptimizerSettings::new(grid, self.refine.unwrap_or(4))?,
            side: self.side.unwrap_or_default(),
        })
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = RunConfig::parse(&text)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into())
}

fn report(audits: &[AuditOutcome]) -> i32 {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for a in audits {
        let _ = writeln!(out, "{a}");
    }
    if audits.iter().all(|a| a.passed) {
        EXIT_OK
    } else {
        EXIT_AUDIT_FAILED
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sweep { config, overrides, svg } => {
            let cfg = load(&config, &overrides)?;
            let scenario = cfg.scenario()?;
            let result = run_sweep(&scenario, &cfg.partitions, cfg.pipeline, cfg.sweep_options()?)?;
            let name = stem(&config);
            let csv_path = cfg.out_dir.join(format!("{name}.csv"));
            csv::emit_csv(&result, &csv_path)?;
            eprintln!("wrote {}", csv_path.display());
            if svg || cfg.svg {
                let svg_path = cfg.out_dir.join(format!("{name}.svg"));
                svg::emit_svg_plot(&result, &[Measure::Quantum, Measure::Classical], &svg_path)?;
                eprintln!("wrote {}", svg_path.display());
            }
            Ok(report(&result.audits))
        }
        Command::Audit {
            config,
            figure,
            overrides,
        } => {
            let mut audits = Vec::new();
            if let Some(n) = figure {
                let spec = figure_spec(n).ok_or_else(|| Error::Config(format!("figure: no figure {n}")))?;
                let options = overrides.options()?;
                for (k, (label, _, _)) in OVERLAYS.iter().enumerate() {
                    for mut a in run_audits(&spec.scenario(k)?, options, Default::default())? {
                        a.name = format!("[{label}] {}", a.name);
                        audits.push(a);
                    }
                }
            } else if let Some(path) = config {
                let cfg = load(&path, &overrides)?;
                audits = run_audits(&cfg.scenario()?, cfg.sweep_options()?, cfg.audits)?;
            }
            Ok(report(&audits))
        }
        Command::Figures { overrides } => {
            let out = overrides.out.clone().unwrap_or_else(|| PathBuf::from("figures"));
            for p in figures::emit_figures(&out, overrides.options()?)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(EXIT_OK)
        }
        Command::Oracle { config, overrides } => {
            let out_given = overrides.out.is_some();
            let mut cfg = load(&config, &overrides)?;
            cfg.pipeline = Pipeline::BruteForce;
            let result = run_sweep(&cfg.scenario()?, &cfg.partitions, cfg.pipeline, cfg.sweep_options()?)?;
            if out_given {
                let path = cfg.out_dir.join(format!("{}_oracle.csv", stem(&config)));
                csv::emit_csv(&result, &path)?;
                eprintln!("wrote {}", path.display());
            } else {
                std::io::stdout().write_all(csv::csv_string(&result.records).as_bytes())?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            EXIT_CONFIG
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_AUDIT_FAILED
        }
    }
}
