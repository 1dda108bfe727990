use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cqnls_cli::{dispatch, resolve, CliError, ErrorRecord, Experiment, Outcome, Overrides};

/// Numerical experiments for the cubic-quintic NLS.
#[derive(Debug, Parser)]
#[command(name = "cqnls", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// INI configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; its parent must exist.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for random perturbations.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads.
    #[arg(long, global = true, env = "CQNLS_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solitary-wave profile at one frequency.
    Groundstate,
    /// Mass against frequency over a sweep, with slope verdicts.
    Masscurve,
    /// Time evolution with diagnostics.
    Evolve,
    /// Perturbed-soliton run tracking the orbit distance.
    Stability,
    /// Planar dispersion run with the L⁶ decay fit.
    Scatter,
    /// Linearized spectrum and the zero-energy radial solution.
    Spectrum,
    /// Minimal three-dimensional soliton mass.
    Rho0,
}

impl Command {
    fn experiment(&self) -> Experiment {
        match self {
            Self::Groundstate => Experiment::Groundstate,
            Self::Masscurve => Experiment::Masscurve,
            Self::Evolve => Experiment::Evolve,
            Self::Stability => Experiment::Stability,
            Self::Scatter => Experiment::Scatter,
            Self::Spectrum => Experiment::Spectrum,
            Self::Rho0 => Experiment::Rho0,
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(n) = cli.threads {
        // Only fails if a pool was already installed, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}", path.display()), e))?,
        None => String::new(),
    };
    let overrides = Overrides { output_dir: cli.out.clone(), seed: cli.seed };
    let config = resolve(cli.command.experiment(), &text, &overrides)?;
    dispatch(&config)
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for failed flags.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads == Some(0) {
        eprintln!("--threads must be at least 1");
        return ExitCode::from(1);
    }
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::FlagsFailed(flags)) => {
            eprintln!("acceptance flags failed: {}", flags.join(", "));
            ExitCode::from(2)
        }
        Err(err) => {
            let record = ErrorRecord::from(&err);
            eprintln!("{}", serde_json::to_string(&record).unwrap_or_else(|_| err.to_string()));
            ExitCode::from(1)
        }
    }
}
