//! Scan orchestration behind the `twophoton` binary.

pub mod config;
pub mod error;
pub mod plot;
pub mod scan;

pub use config::ScanConfig;
pub use error::{CliError, CliResult};
pub use plot::{emit_plot_script, plot_script};
pub use scan::{config_from_csv, run_scan, Dataset, Row};

use twophoton::corpus::{self, GoldenReport};

pub fn run_golden(id_or_dir: &str) -> CliResult<GoldenReport> {
    let c = corpus::resolve(id_or_dir)?;
    Ok(corpus::run_golden(&c)?)
}
