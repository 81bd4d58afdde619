//! Command-line runner for JSON scenarios.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tpslab::error::Result;
use tpslab::scattering::PhaseShiftModel;
use tpslab::scenario::{parse_scenario, run_scenario, write_report, Format, Overrides};

/// Exit status for errors that stop a run before any check is evaluated.
const ERROR_EXIT: u8 = 126;

#[derive(Parser)]
#[command(name = "tpslab", version, about = "Run entanglement scenarios and report checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario; the exit code is the number of failed checks.
    Run {
        scenario: PathBuf,
        /// Report path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        /// Overrides the seed in the scenario file.
        #[arg(long)]
        seed: Option<u64>,
        /// Phase-shift model: zero, hard_sphere:A, square_well:V0,A,MU or table:PATH.
        #[arg(long)]
        smatrix: Option<PhaseShiftModel>,
    },
    /// Check a scenario file against the schema without running it.
    Validate { scenario: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("TPSLAB_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| {
            tpslab::error::Error::InvalidParameter(format!("TPSLAB_THREADS must be a positive integer, got '{v}'"))
        })?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| tpslab::error::Error::InvalidParameter(e.to_string()))?;
        }
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { scenario } => {
            let text = std::fs::read_to_string(&scenario)?;
            let (s, _) = parse_scenario(&text)?;
            println!("ok: {} ({})", s.name, serde_json::to_value(s.experiment)?.as_str().unwrap_or_default());
            Ok(0)
        }
        Command::Run { scenario, out, format, seed, smatrix } => {
            configure_threads()?;
            let text = std::fs::read_to_string(&scenario)?;
            let (s, params) = parse_scenario(&text)?;
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            };
            let report = run_scenario(&s, &params, &Overrides { seed, smatrix })?;
            match out {
                Some(path) => {
                    let mut w = BufWriter::new(File::create(&path)?);
                    write_report(&report, format, &mut w)?;
                    w.flush()?;
                }
                None => write_report(&report, format, std::io::stdout().lock())?,
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: value {:.6e}, tolerance {:.6e}", c.name, c.value, c.tolerance);
            }
            Ok(report.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT)
        }
    }
}
