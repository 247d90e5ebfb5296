use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use adm::montecarlo::{empirical_bep, run_trials_with_workers, TrialConfig};
use adm::sweep::{emit_csv, emit_plot, run_sweep, Axis, SweepSpec};
use adm::{Result, SystemConfig, VarianceMode};

#[derive(Parser)]
#[command(name = "adm", version, about = "Affinity-division multiplexing: analytical BEP and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytical thresholds and BEP for one configuration, as JSON.
    Analyze {
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Sweep one parameter and write CSV (and optionally SVG).
    Sweep {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        axis: Axis,
        /// Comma-separated ascending axis values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Run the Monte Carlo simulator at every point.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_plot: Option<PathBuf>,
    },
    /// Monte Carlo run of one configuration; summary JSON to stdout.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
        /// Per-trial bits, estimates and errors.
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
}

/// Config file plus per-field overrides.
#[derive(Args)]
struct SystemArgs {
    /// Flat TOML file with SystemConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variance_mode: Option<VarianceMode>,
    #[arg(long)]
    receptors: Option<usize>,
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    distance: Option<f64>,
    #[arg(long)]
    n0: Option<f64>,
    #[arg(long)]
    n1: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    k_on: Option<f64>,
    #[arg(long)]
    k_off_base: Option<f64>,
}

impl SystemArgs {
    fn resolve(&self) -> Result<SystemConfig> {
        let mut cfg = match &self.config {
            Some(path) => SystemConfig::load(path)?,
            None => SystemConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(x) = self.$field {
                    cfg.$field = x;
                }
            )*};
        }
        set!(variance_mode, receptors, channels, gamma, distance, n0, n1, v, k_on, k_off_base);
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { system } => {
            let cfg = system.resolve()?;
            let scenario = cfg.build()?;
            let report = scenario.mean_bep(cfg.variance_mode)?;
            let channels: Vec<_> = report
                .channels
                .iter()
                .zip(scenario.panel.k_off())
                .enumerate()
                .map(|(i, (d, k))| {
                    json!({
                        "channel": i + 1,
                        "k_off": k,
                        "threshold": d.threshold,
                        "bep": d.bep,
                        "bit0": d.moments0,
                        "bit1": d.moments1,
                    })
                })
                .collect();
            let out = json!({
                "config": cfg,
                "condition_number": scenario.sep.condition_number(),
                "channels": channels,
                "mean_bep": report.mean_bep,
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Command::Sweep {
            system,
            axis,
            values,
            mc,
            trials,
            seed,
            workers,
            out_csv,
            out_plot,
        } => {
            let base = system.resolve()?;
            let mut spec = SweepSpec::new(base, axis, values);
            if mc {
                spec = spec.with_montecarlo(trials, seed);
            }
            spec.workers = workers;
            let result = run_sweep(&spec)?;
            emit_csv(&result, base.channels, &out_csv)?;
            if let Some(path) = out_plot {
                emit_plot(&result, path)?;
            }
        }
        Command::Simulate {
            system,
            trials,
            seed,
            workers,
            out_csv,
        } => {
            let cfg = system.resolve()?;
            let scenario = cfg.build()?;
            let analytical = scenario.mean_bep(cfg.variance_mode).ok();
            let tc = TrialConfig::new(scenario, trials, seed)?;
            let result = run_trials_with_workers(&tc, cfg.variance_mode, workers)?;
            if let Some(path) = out_csv {
                let file = File::create(path)?;
                result.write_csv(BufWriter::new(file))?;
            }
            let out = json!({
                "config": cfg,
                "trials": trials,
                "seed": seed,
                "thresholds": result.thresholds,
                "empirical": empirical_bep(&result),
                "analytical_mean_bep": analytical.map(|r| r.mean_bep),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
