use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use weakrel_harness::config::{
    OutputFormat, PointerFixture, PsibarChoice, SweepConfig, SweepRelation,
};
use weakrel_harness::report::{emit_report, to_json_bytes, write_bytes};
use weakrel_harness::studies::{run_cv_study, run_pointer_study, CvState};
use weakrel_harness::{run_fixtures, run_sweep};

#[derive(Parser)]
#[command(
    name = "weakrel",
    version,
    about = "Verify weak-value uncertainty and complementarity relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized sweep over the selected relations.
    Sweep(SweepArgs),
    /// Run every named fixture.
    Fixtures {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Window weak values on a position/momentum grid.
    CvStudy {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        widths: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "gaussian")]
        state: CvState,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact pointer simulation across a coupling ladder.
    Pointer {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        g_ladder: Option<Vec<f64>>,
        #[arg(long)]
        meter_points: Option<usize>,
        #[arg(long, value_enum)]
        fixture: Option<PointerFixture>,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct SweepArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    relations: Option<Vec<SweepRelation>>,
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Relation tolerance; a row fails when slack < -tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum)]
    psibar: Option<PsibarChoice>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(path: Option<&PathBuf>) -> Result<SweepConfig> {
    Ok(match path {
        Some(p) => SweepConfig::from_file(p)?,
        None => SweepConfig::default(),
    })
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let mut c = load(args.config.as_ref())?;
    if let Some(v) = args.relations {
        c.relations = v;
    }
    if let Some(v) = args.dims {
        c.dims = v;
    }
    if let Some(v) = args.trials {
        c.trials = v;
    }
    if let Some(v) = args.seed {
        c.seed = v;
    }
    if let Some(v) = args.tolerance {
        c.tolerances.relation = v;
    }
    if let Some(v) = args.psibar {
        c.psibar = v;
    }
    if let Some(v) = args.hbar {
        c.hbar = v;
    }
    if let Some(v) = args.format {
        c.format = v;
    }
    if args.out.is_some() {
        c.out = args.out;
    }
    let set = run_sweep(&c)?;
    emit_report(&set, c.format, c.out.as_deref())?;
    let a = &set.aggregates;
    eprintln!(
        "{} trials, {} failures, min slack {}, {} rejections, {} ms",
        a.trials,
        a.failure_count,
        a.min_slack.map_or("n/a".to_owned(), |s| format!("{s:.3e}")),
        a.rejections,
        set.wall_clock_ms
    );
    Ok(set.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Fixtures { out } => {
            let set = run_fixtures()?;
            emit_report(&set, OutputFormat::Json, out.as_deref())?;
            for f in set.fixtures.iter().filter(|f| !f.passed) {
                eprintln!(
                    "FAIL {}: expected {} observed {}",
                    f.name, f.expected, f.observed
                );
            }
            eprintln!(
                "{} fixtures, {} failed",
                set.fixtures.len(),
                set.aggregates.fixture_failures
            );
            Ok(set.passed())
        }
        Command::CvStudy {
            config,
            grid_points,
            widths,
            state,
            hbar,
            out,
        } => {
            let c = load(config.as_ref())?;
            let mut cv = c.cv.clone();
            if let Some(n) = grid_points {
                cv.grid_points = n;
            }
            if let Some(w) = widths {
                cv.widths = w;
            }
            let c = SweepConfig {
                cv,
                hbar: hbar.unwrap_or(c.hbar),
                ..c
            };
            c.validate()?;
            let report = run_cv_study(&c.cv, c.hbar, state)?;
            write_bytes(&to_json_bytes(&report)?, out.as_deref())?;
            Ok(report.refinement_monotone)
        }
        Command::Pointer {
            config,
            g_ladder,
            meter_points,
            fixture,
            hbar,
            out,
        } => {
            let c = load(config.as_ref())?;
            let mut p = c.pointer.clone();
            if let Some(g) = g_ladder {
                p.g_ladder = g;
            }
            if let Some(m) = meter_points {
                p.meter_points = m;
            }
            if let Some(f) = fixture {
                p.fixture = f;
            }
            let c = SweepConfig {
                pointer: p,
                hbar: hbar.unwrap_or(c.hbar),
                ..c
            };
            c.validate()?;
            let report = run_pointer_study(&c.pointer, c.hbar)?;
            write_bytes(&to_json_bytes(&report)?, out.as_deref())?;
            Ok(report.rows.iter().all(|r| r.norm_defect <= 1e-12))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()).context("weakrel") {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
