//! Scenario files, the end-to-end pipeline and report rendering.

mod emit;
mod pipeline;
mod scenario;

pub use emit::{emit_group, emit_report, Format, SCHEMA};
pub use pipeline::{
    group_section, log_lines, pi1_section, run_pipeline, ConfigSummary, LocalRow, LogLine,
    Pi1Section, PipelineError, PipelineOptions, PointRow, Report, SbEntry, SeifertSection, SpinRow,
    SpinSection, Stage, Status, SurfaceRow, Verdict, DEFAULT_COSET_BOUND, DEFAULT_MAX_EXPONENT,
    DEFAULT_SEARCH_BOUND,
};
pub use scenario::{
    config_text, emit_scenario, op_text, parse_scenario, BaseSpec, Builtin, GroupBlock,
    GroupSource, ParseError, Scenario, SeifertBlock, SpinTarget,
};
