//! Trace I/O, synthetic traces, packet-loss simulation and the benchmark runner.

mod drop;
mod experiment;
mod report;
mod synth;
mod trace;

pub use drop::{simulate_drop, DropSimulator};
pub use experiment::{
    cell_seed, prepare_trace, run_experiment, run_predictions, run_prepared, ExperimentConfig,
    PredictionRecord, PreparedTrace,
};
pub use report::{
    emit_report, format_float, format_repeats_csv, format_samples_csv, format_summary_csv, format_table,
    ExperimentReport, RepeatRow, SampleRow, SummaryRow, REPEATS_HEADER, SAMPLES_HEADER, SUMMARY_HEADER,
};
pub use synth::{generate_synthetic_trace, ProfileKind, SynthProfile};
pub use trace::{format_trace, load_trace, median_interval, parse_trace, write_trace, TRACE_HEADER};
