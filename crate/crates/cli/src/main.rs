use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fourns_cli::{cmd_calc, cmd_lab, cmd_simulate, cmd_sweep_n, ExperimentConfig, HarnessError, OUT_ENV};

#[derive(Parser, Debug)]
#[command(name = "fourns", version, about = "Pseudo-spectral 4-NLS runs and I-method diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the flow and write the diagnostics CSV and final checkpoint.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Modified-energy increment over the cutoff list, with a log-log fit.
    SweepN {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample multiplier bounds and Strichartz ratios.
    Lab {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact exponent table.
    Calc {
        #[arg(long)]
        config: PathBuf,
    },
}

fn dispatch(cmd: Command) -> Result<fourns_cli::Artifacts, HarnessError> {
    let env = std::env::var(OUT_ENV).ok();
    let env = env.as_deref();
    match cmd {
        Command::Simulate { config } => cmd_simulate(ExperimentConfig::load(&config)?, env),
        Command::SweepN { config } => cmd_sweep_n(ExperimentConfig::load(&config)?, env),
        Command::Lab { config, seed } => cmd_lab(ExperimentConfig::load(&config)?, seed, env),
        Command::Calc { config } => cmd_calc(ExperimentConfig::load(&config)?, env),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(art) => {
            for f in &art.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fourns: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
