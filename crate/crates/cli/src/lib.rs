//! Configuration-driven experiment runner for `pnc-lab-core`: parse a JSON
//! config, run it, and emit CSV or JSON.

pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;

pub use config::{parse_config, ExperimentConfig, Format, Mode};
pub use error::{CliError, Result};
pub use output::{read_records, records_to_curves, Record, Report};
pub use run::run;
