//! Config-driven experiments on top of `sonn-core`: training, metrics rows,
//! connection reduction, planning queries, comparison tables and plot data.
//!
//! Every file written here carries the experiment id, the config hash and the
//! seed, and re-running a config reproduces its outputs byte for byte.

pub mod compare;
pub mod config;
pub mod export;
pub mod output;
pub mod run;

pub use compare::{compare_models, ComparisonTable};
pub use config::{load_experiments, parse_experiments, ConfigError, ExperimentConfig};
pub use export::{export_plot_data, read_plot_edges, ExportError, PlotFiles};
pub use output::Provenance;
pub use run::{run_all, run_experiment, write_results, ExperimentOutcome, ResultRow, RunError};
