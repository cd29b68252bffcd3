use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use preytaxis::{commands, CliError, LengthRange, RunConfig, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "preytaxis", version, about = "Two-predator prey-taxis model: thresholds, bifurcations and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the scenario's `out`, then `out`.
    #[arg(long, env = "PREYTAXIS_OUT")]
    out: Option<PathBuf>,
    /// Overrides the grid size of the scenario.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Reserved; accepted and ignored.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Threshold table chi_S, chi_H, chi_M per mode.
    Thresholds(Common),
    /// Critical mode and value over a range of domain lengths.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Inclusive integer range `A:B`.
        #[arg(long = "L", value_name = "A:B", value_parser = LengthRange::parse)]
        lengths: Option<LengthRange>,
    },
    /// Pitchfork coefficient and branch verdicts.
    K2 {
        #[command(flatten)]
        common: Common,
        /// Mode; defaults to the critical one.
        #[arg(long)]
        k: Option<u32>,
    },
    /// Time integration with snapshots, probes and a pattern report.
    Simulate(Common),
    /// Cosine spectrum of a profile CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// CSV whose first column is x and whose other columns are profiles.
        #[arg(long)]
        profile: PathBuf,
    },
}

fn load(c: &Common) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = RunConfig::load(&c.config)?;
    if let Some(n) = c.grid_n {
        cfg.grid_n = n;
    }
    let out = c.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Thresholds(c) => load(&c).and_then(|(cfg, out)| commands::thresholds(&cfg, &out)),
        Command::Sweep { common, lengths } => load(&common).and_then(|(cfg, out)| commands::sweep(&cfg, lengths, &out)),
        Command::K2 { common, k } => load(&common).and_then(|(cfg, out)| commands::k2(&cfg, k, &out)),
        Command::Simulate(c) => load(&c).and_then(|(cfg, out)| commands::simulate(&cfg, &out)),
        Command::Spectrum { common, profile } => {
            load(&common).and_then(|(cfg, out)| commands::spectrum(&cfg, &profile, &out))
        }
    }
    .map(|_| ())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
