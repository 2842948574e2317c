use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use env_logger::Env;
use log::info;
use sharplab_cli::{emit_plot_data, parse_config, run_suite, write_outputs, RunConfig, Suite};

/// Runs sharp-constant verification suites and writes CSV/JSON reports.
#[derive(Parser, Debug)]
#[command(name = "sharplab", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suite to run; overrides the configuration.
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo seed; overrides `quadrature.mc_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Pass/fail tolerance for equality and lower-bound checks.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn load(args: &Args) -> Result<RunConfig> {
    let mut config = match (&args.config, args.suite) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(suite)) => RunConfig::new(suite),
        (None, None) => anyhow::bail!("either --config or --suite is required"),
    };
    if let Some(suite) = args.suite {
        if suite != config.suite {
            config.suite = suite;
            if matches!(suite, Suite::Identities | Suite::All) && config.triple.is_none() {
                config.triple = RunConfig::new(suite).triple;
            }
            if suite == Suite::All && config.grids.is_none() {
                config.grids = Some(Default::default());
            }
        }
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.clone());
    }
    if let Some(seed) = args.seed {
        config.quadrature = Some(config.quadrature().with_seed(seed));
    }
    if let Some(t) = args.tolerance {
        config.tolerance = Some(t);
    }
    config.validate()?;
    Ok(config)
}

fn run(args: Args) -> Result<bool> {
    let config = load(&args)?;
    let dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("sharplab-out"));
    let result = run_suite(&config)?;
    for path in write_outputs(&result, &dir).context("writing reports")? {
        info!("wrote {}", path.display());
    }
    for path in emit_plot_data(&result, &dir).context("writing plot data")? {
        info!("wrote {}", path.display());
    }
    println!(
        "{} {}: {} checks, {} failed ({:.2} s)",
        if result.pass { "PASS" } else { "FAIL" },
        result.suite,
        result.rows.len(),
        result.failures(),
        result.wall_time_seconds
    );
    Ok(result.pass)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
