use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use waveguide_cli::{run, CliError, ExperimentConfig, ExperimentKind, Overrides};

#[derive(Parser)]
#[command(name = "waveguide-gap", version, about = "Spectral gap experiments for periodic curved waveguides")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility of the strip around the configured curve.
    CheckCurve(Options),
    /// Lowest eigenpairs on the finest grid for every length.
    Spectrum(Options),
    /// Extrapolated gap against the number of periods.
    GapScaling(Options),
    /// Gap of the straightened operator against the comparison bounds.
    Compare(Options),
    /// Invariant suite; without --config, runs the built-in suite.
    Verify(Options),
    /// Runs the kind named in the configuration file.
    Run(Options),
}

#[derive(Args)]
struct Options {
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Cells per period and transverse cells at the coarsest level.
    #[arg(long, value_name = "N")]
    grid_cells: Option<usize>,
    #[arg(long, value_name = "N")]
    levels: Option<usize>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "X")]
    slack: Option<f64>,
}

impl Options {
    fn overrides(&self) -> Overrides {
        Overrides { out: self.out.clone(), grid_cells: self.grid_cells, levels: self.levels, seed: self.seed, slack: self.slack }
    }
}

fn execute(command: Command) -> Result<Vec<String>, CliError> {
    let (kind, options) = match command {
        Command::CheckCurve(o) => (Some(ExperimentKind::CheckCurve), o),
        Command::Spectrum(o) => (Some(ExperimentKind::Spectrum), o),
        Command::GapScaling(o) => (Some(ExperimentKind::GapScaling), o),
        Command::Compare(o) => (Some(ExperimentKind::Compare), o),
        Command::Verify(o) => (Some(ExperimentKind::Verify), o),
        Command::Run(o) => (None, o),
    };
    let mut config = match (&options.config, kind) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(ExperimentKind::Verify)) => ExperimentConfig::default_suite(),
        (None, _) => return Err(CliError::Validation("--config is required".into())),
    };
    config.apply(&options.overrides());
    let kind = kind
        .or(config.experiment.kind)
        .ok_or_else(|| CliError::Validation("experiment.kind is not set in the configuration".into()))?;
    Ok(run(kind, &config)?.lines)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
