//! Command-line front end: CSV ingestion, the `mask`, `simulate` and
//! `report` subcommands, and atomic output.

pub mod app;
pub mod commands;
pub mod dataset;
pub mod error;
pub mod output;

pub use commands::{
    cmd_mask, cmd_report, cmd_simulate, run_simulation, MaskJob, ReportJob, Simulation,
    SimulationConfig,
};
pub use dataset::{load_csv, save_csv, Dataset};
pub use error::CliError;
