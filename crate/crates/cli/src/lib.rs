//! Command-line front end for the `adoption-index` library: TOML study specs
//! and simulation plans, CSV survey data, and table or JSON reports.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod report;

pub use commands::{
    cmd_compute, cmd_simulate, cmd_surface, cmd_test_one, cmd_test_reference, cmd_test_two,
    execute, Command, RunConfig,
};
pub use config::{load_plan, load_spec, parse_plan, parse_spec, LoadedSpec};
pub use data::{load_data, parse_data};
pub use error::{CliError, Result};
pub use report::{parse_structured, render, Format, Report};
