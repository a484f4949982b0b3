use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use decoherence_kit::commands::DEFAULT_COMPARE_TOL;
use decoherence_kit::{cmd_compare, cmd_run, cmd_verify, Options};

#[derive(Parser)]
#[command(name = "decoherence-kit", version, about = "Run and check collisional decoherence scenarios")]
struct Cli {
    /// Seed for the random probe states used by `verify`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Suppress reports on stdout; errors still go to stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the initial state and write the observables as CSV.
    Run { config: PathBuf },
    /// Run the property checks that apply to the configured generator.
    Verify { config: PathBuf },
    /// Compare the generators and trajectories of two scenarios on one lattice.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_COMPARE_TOL)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let opts = Options {
        seed: cli.seed,
        quiet: cli.quiet,
    };
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config, &opts),
        Command::Verify { config } => cmd_verify(config, &opts),
        Command::Compare {
            config_a,
            config_b,
            tol,
        } => cmd_compare(config_a, config_b, *tol, &opts),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
