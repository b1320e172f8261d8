//! Scenario runner for the `repfam` toolkit: parses scenario files, runs
//! their queries and renders deterministic JSON reports and CSV spectrum
//! dumps.

pub mod error;
pub mod gallery;
pub mod report;
pub mod scenario;

use std::path::Path;

pub use error::CliError;
pub use report::{render, run_scenario, spectrum_csv, Report, RunOptions};

/// Prefix selecting an embedded scenario instead of a file.
pub const GALLERY_PREFIX: &str = "gallery:";

/// Reads a scenario from a file, or from the gallery for `gallery:<name>`.
pub fn load_scenario_text(source: &str) -> Result<String, CliError> {
    match source.strip_prefix(GALLERY_PREFIX) {
        Some(name) => gallery::find(name)
            .map(|e| e.text.to_string())
            .ok_or_else(|| CliError::Parse(format!("no gallery scenario named '{name}'"))),
        None => std::fs::read_to_string(Path::new(source)).map_err(|e| CliError::Io(format!("{source}: {e}"))),
    }
}

/// Parses and runs a scenario source.
pub fn run_source(source: &str, opts: RunOptions) -> Result<Report, CliError> {
    let scenario = scenario::parse(&load_scenario_text(source)?)?;
    run_scenario(&scenario, opts)
}

/// Runs the scenario and writes the spectrum of query `query_id` as CSV.
pub fn dump_spectrum(source: &str, query_id: &str, out: &Path) -> Result<usize, CliError> {
    let report = run_source(source, RunOptions::default())?;
    let q = report
        .queries
        .iter()
        .find(|q| q.id == query_id)
        .ok_or_else(|| CliError::IncompatibleQuery(format!("no query with id '{query_id}'")))?;
    let s = q
        .result
        .spectrum()
        .ok_or_else(|| CliError::IncompatibleQuery(format!("query '{query_id}' does not produce a spectrum")))?;
    std::fs::write(out, spectrum_csv(s)).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    Ok(s.len())
}

/// Applies `REPFAM_THREADS` to the global thread pool, if set.
pub fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("REPFAM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("REPFAM_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(CliError::Parse("REPFAM_THREADS must be at least 1".into()));
        }
        // A second initialization (e.g. in tests) keeps the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
