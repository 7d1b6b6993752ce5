//! Configuration, command dispatch and artifact emission for `stripelab`.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{emit_config, parse_config, ConfigError, RunConfig};
pub use emit::{emit_grid, emit_plot, fmt_num, grid_csv, plot_svg};
pub use run::{execute, CliError, Report};
