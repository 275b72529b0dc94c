use std::path::PathBuf;
use std::process::ExitCode;

use calogero_coherent::cli::{parse_scenario, run_scenario, ToleranceProfile};
use clap::Parser;

/// Build and verify coherent states of Calogero-Sutherland-type oscillators
/// from a scenario file.
#[derive(Debug, Parser)]
#[command(name = "calogero-coherent", version)]
struct Args {
    /// Scenario file (INI sections: schedule, model, classical, construction, task.NAME).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for summary.json and the per-task CSV files.
    #[arg(long)]
    out: PathBuf,
    /// Master seed for every random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Log progress to stderr.
    #[arg(long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let profile = match ToleranceProfile::from_env() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let scenario = match parse_scenario(&args.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: invalid scenario {}:\n{e}", args.scenario.display());
            return ExitCode::from(2);
        }
    };
    match run_scenario(&scenario, &args.out, args.seed, profile) {
        Ok(outcome) => {
            for task in &outcome.summary.tasks {
                let status = if task.passed { "pass" } else { "FAIL" };
                match &task.error {
                    Some(e) => println!("{status} {} ({}): {e}", task.name, task.kind),
                    None => println!("{status} {} ({})", task.name, task.kind),
                }
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
