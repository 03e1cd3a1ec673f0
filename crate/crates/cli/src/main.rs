use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use kaonsim_cli::{execute, Overrides, Scenario};

/// Kaon mixing, regeneration and CP violation emulated with Josephson phase qubits.
#[derive(Debug, Parser)]
#[command(name = "kaonsim", version)]
struct Args {
    scenario: Scenario,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV output path (overrides output.csv_path).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot path (overrides output.svg_path).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// JSON summary path (overrides output.json_path).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Only report errors.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let level = if args.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let overrides = Overrides {
        out: args.out,
        svg: args.svg,
        json: args.json,
    };
    match execute(args.scenario, &args.config, &overrides) {
        Ok(outcome) => {
            if !args.quiet {
                println!(
                    "wrote {} rows to {}",
                    outcome.rows,
                    outcome.csv_path.display()
                );
                for p in outcome.svg_path.iter().chain(&outcome.json_path) {
                    println!("wrote {}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kaonsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
