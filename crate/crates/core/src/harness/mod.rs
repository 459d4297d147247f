//! File-driven front end: documents in, reports and plot data out.

pub mod document;
pub mod output;
pub mod pipeline;

pub use document::{parse_system, HistoryDoc, SystemDocument, WORKED_EXAMPLE};
pub use output::{emit_outputs, write_rateplot};
pub use pipeline::{
    config_hash, parse_stages, run_pipeline, Provenance, RunOptions, RunOutput, RunReport, SimulationSummary, Stage,
    StageOutcome, TransformSummary, EXIT_INPUT, EXIT_PASS, EXIT_VERDICT,
};
