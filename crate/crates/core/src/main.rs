use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spacs_sim::cli::{self, CliError, Format};

/// Heralded photon addition in cascaded parametric amplifiers.
#[derive(Parser)]
#[command(name = "spacs", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report as canonical JSON.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output file; standard output when omitted or `-`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// lambda, alpha, nbar or n_amplifiers
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. 0.02,0.01,0.005
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the Wigner function of the configured target as CSV.
    Wigner {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in verification suite.
    Verify,
    /// Print the JSON Schema of scenario configs.
    Schema,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result: Result<(), CliError> = match args.command {
        Command::Simulate { config, out } => cli::simulate(&config, out.as_deref()),
        Command::Sweep { config, param, values, format, out } => {
            cli::sweep(&config, &param, &values, format, out.as_deref())
        }
        Command::Wigner { config, out } => cli::wigner(&config, Some(&out)),
        Command::Verify => return ExitCode::from(cli::verify() as u8),
        Command::Schema => cli::write_output(None, &cli::schema()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code as u8)
        }
    }
}
