use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use layerchain_cli::commands::{self, Outcome};
use layerchain_cli::config::{parse_config, Config};
use layerchain_cli::CliError;

#[derive(Parser)]
#[command(name = "layerchain", version, about = "Spectra and string-separation energies of coupled layer chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the random oracle suites.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Worker threads, 0 = one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Decoupling residuals per layer pair; exits 3 when violated.
    Check,
    /// Normal-mode frequencies and eigenvectors.
    Modes,
    /// String levels with degeneracies up to `energy_cap`.
    Spectrum,
    /// Intra-layer levels and mean square radii.
    Intra,
    /// Separation energy per layer against N.
    Separation,
    /// Energy budget along one parameter axis.
    Sweep,
    /// Oracle cross-checks; exits 3 if any fails.
    Verify,
}

fn load(path: Option<&PathBuf>) -> Result<Option<Config>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text).map(Some)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let config = load(cli.config.as_ref())?;
    let need = || config.as_ref().ok_or_else(|| CliError::Config("--config is required for this subcommand".into()));
    match cli.command {
        Command::Check => commands::check(need()?),
        Command::Modes => commands::modes(need()?),
        Command::Spectrum => commands::spectrum(need()?),
        Command::Intra => commands::intra(need()?),
        Command::Separation => commands::separation(need()?),
        Command::Sweep => commands::sweep_table(need()?),
        Command::Verify => commands::verify(config.as_ref(), cli.seed),
    }
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), CliError> {
    let csv = outcome.table.to_csv();
    match &cli.out {
        Some(path) => fs::write(path, csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(csv.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        emit(&cli, &outcome)?;
        if let Some(s) = &outcome.summary {
            eprintln!("{s}");
        }
        if outcome.passed {
            Ok(())
        } else {
            Err(CliError::Physics(outcome.summary.clone().unwrap_or_else(|| "checks failed".into())))
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
