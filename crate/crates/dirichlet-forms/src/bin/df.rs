//! `df` — run the library's experiment scenarios from the command line.
//!
//! Exit codes: 0 when every check passes, 1 on a check failure or runtime
//! error, 2 on usage/configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dirichlet_forms::config::ExperimentConfig;
use dirichlet_forms::experiments;
use dirichlet_forms::Error;

#[derive(Parser)]
#[command(
    name = "df",
    version,
    about = "Dirichlet-form scenarios: spectra, Markov chains, capacities",
    after_help = "Config files are flat `key = value` documents; every key \
                  has a CLI flag of the same name. The DF_OUT environment \
                  variable sets the default output directory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce the Ornstein-Uhlenbeck process from the Gaussian ground state
    OuVerify(RunArgs),
    /// Heat-form spectra on circle and interval grids, with verdicts
    Heat(RunArgs),
    /// Correspondence-chain residuals on seeded random forms
    Roundtrip(RunArgs),
    /// Capacity tables, equilibrium potentials, exceptional-set audit
    Capacity(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key-value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to $DF_OUT or ./df-out)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long = "grid-a", allow_negative_numbers = true)]
    grid_a: Option<f64>,
    #[arg(long = "grid-b", allow_negative_numbers = true)]
    grid_b: Option<f64>,
    #[arg(long)]
    circumference: Option<f64>,
    #[arg(long = "circle-n")]
    circle_n: Option<usize>,
    /// Monte Carlo paths per association check
    #[arg(long)]
    paths: Option<usize>,
    /// Trajectory horizon for occupation sampling
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long = "burn-in")]
    burn_in: Option<f64>,
    /// Number of random forms in the roundtrip scenario
    #[arg(long)]
    forms: Option<usize>,
}

impl RunArgs {
    fn into_config(self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, Error> {
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.out {
            cfg.out_dir = v;
        }
        if let Some(v) = self.grid_n {
            cfg.grid_n = v;
        }
        if let Some(v) = self.grid_a {
            cfg.grid_a = v;
        }
        if let Some(v) = self.grid_b {
            cfg.grid_b = v;
        }
        if let Some(v) = self.circumference {
            cfg.circumference = v;
        }
        if let Some(v) = self.circle_n {
            cfg.circle_n = v;
        }
        if let Some(v) = self.paths {
            cfg.paths = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.burn_in {
            cfg.burn_in = v;
        }
        if let Some(v) = self.forms {
            cfg.forms = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (defaults, runner): (_, fn(&ExperimentConfig) -> dirichlet_forms::Result<_>) =
        match &cli.command {
            Command::OuVerify(_) => (ExperimentConfig::ou_defaults(), experiments::run_ou_verify),
            Command::Heat(_) => (ExperimentConfig::heat_defaults(), experiments::run_heat),
            Command::Roundtrip(_) => {
                (ExperimentConfig::roundtrip_defaults(), experiments::run_roundtrip)
            }
            Command::Capacity(_) => {
                (ExperimentConfig::capacity_defaults(), experiments::run_capacity)
            }
        };
    let args = match cli.command {
        Command::OuVerify(a) | Command::Heat(a) | Command::Roundtrip(a) | Command::Capacity(a) => a,
    };
    let cfg = match args.into_config(defaults) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("df: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match runner(&cfg) {
        Ok(report) => {
            report.print_summary();
            let dir = cfg.out_dir.join(&cfg.scenario);
            println!("report files in {}", dir.display());
            if report.all_pass {
                ExitCode::SUCCESS
            } else {
                let names: Vec<&str> =
                    report.failures().iter().map(|c| c.name.as_str()).collect();
                eprintln!("df: failed checks: {}", names.join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("df: {e}");
            ExitCode::from(1)
        }
    }
}
