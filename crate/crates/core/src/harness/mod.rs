//! Configuration, seeded experiment execution and CSV output.

mod config;
mod output;
mod run;

pub use config::{DrofConfig, OutputConfig, PlanConfig, Preset, RunConfig, SweepGrid};
pub use output::{csv_row, csv_string, write_csv, write_plot, CSV_HEADER, CSV_VERSION};
pub use run::{
    frame_bits, run_drof, run_point, run_single, run_sweep, PointFailure, SweepOutcome, SweepRecord,
};
