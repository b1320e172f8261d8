use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use repfam_cli::{configure_threads, dump_spectrum, gallery, render, run_source, CliError, RunOptions};

/// Invertibility and spectra from families of representations.
#[derive(Parser)]
#[command(name = "repfam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (a file path or `gallery:<name>`) and print its JSON report.
    Run {
        scenario: String,
        /// Include wall-clock timing in the report (breaks byte-identity).
        #[arg(long)]
        timing: bool,
    },
    /// Write the spectrum computed by one query as CSV.
    DumpSpectrum {
        scenario: String,
        query_id: String,
        out: PathBuf,
    },
    /// Inspect the embedded scenarios.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    /// List embedded scenario names.
    List,
    /// Print an embedded scenario.
    Show { name: String },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { scenario, timing } => {
            let report = run_source(&scenario, RunOptions { timing })?;
            print!("{}", render(&report));
        }
        Command::DumpSpectrum { scenario, query_id, out } => {
            let n = dump_spectrum(&scenario, &query_id, &out)?;
            eprintln!("wrote {n} points to {}", out.display());
        }
        Command::Gallery { action } => match action {
            GalleryAction::List => {
                for e in gallery::GALLERY {
                    println!("{}", e.name);
                }
            }
            GalleryAction::Show { name } => {
                let e = gallery::find(&name).ok_or_else(|| CliError::Parse(format!("no gallery scenario '{name}'")))?;
                print!("{}", e.text);
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("repfam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
