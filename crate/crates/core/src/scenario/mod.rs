//! Config ingestion, figure presets, sweeps and result files.

mod config;
mod output;
mod presets;
mod run;

pub use config::*;
pub use output::{write_bundle, SERIES_HEADER, SERIES_STDERR_HEADER, SUMMARY_HEADER};
pub use presets::{preset, PRESET_NAMES};
pub use run::{
    build_model, point_seed, run_scenario, run_sweep, solver_options, CheckOutcome, HandoffEcho, Manifest,
    PointReport, ResolvedEcho, ResultBundle, SeriesTable, SteadyEcho, SummaryRow, MANIFEST_VERSION,
};
