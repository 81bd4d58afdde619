//! Runs a shipped scenario file through the library API and prints the
//! report as CSV. Pass a path to run another file.

use std::path::PathBuf;

use tpslab::scenario::{parse_scenario, run_scenario, write_report, Format, Overrides};

fn main() -> tpslab::error::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| [env!("CARGO_MANIFEST_DIR"), "scenarios", "minimal_gaussian.json"].iter().collect());
    let (scenario, params) = parse_scenario(&std::fs::read_to_string(&path)?)?;
    let report = run_scenario(&scenario, &params, &Overrides::default())?;
    write_report(&report, Format::Csv, std::io::stdout().lock())?;
    eprintln!("{}: {} checks, {} failed", scenario.name, report.checks.len(), report.failures());
    Ok(())
}
