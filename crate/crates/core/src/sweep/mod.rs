//! Parameter sweeps, tabular output and secular/beyond-secular comparison.

mod compare;
mod config;
mod output;
mod run;

pub use compare::{
    compare_modes, ComparisonReport, ModeSummary, PointDiff, ThermalReference, COOLING_REL_TOL,
};
pub use config::{Format, Mode, RunConfig, Sweep, SweepAxis};
pub use output::{read_rows, read_rows_from, CsvSink, JsonSink, RowSink, SweepRow, CSV_HEADER};
pub use run::{evaluate_point, run, run_to, SweepResult, CHUNK_POINTS};
