//! Command-line front end for the kaon-emulation simulator: strict JSON
//! configs in, CSV tables plus optional SVG plots and JSON summaries out.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

use std::path::Path;

pub use config::{parse_config, RunConfig, Scenario};
pub use error::CliError;
pub use run::{compute, run, Outcome, Overrides};

/// Parse `config` for `scenario` and run it.
pub fn execute(
    scenario: Scenario,
    config: &Path,
    overrides: &Overrides,
) -> Result<Outcome, CliError> {
    let cfg = parse_config(config, scenario)?;
    run(&cfg, overrides)
}
