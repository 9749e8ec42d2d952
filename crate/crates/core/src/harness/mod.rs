//! Batch front end: configuration, expression parsing, orchestration of
//! every suite, and report rendering.

mod config;
mod emit;
mod parser;
mod run;

pub use config::{default_coefficient_sets, load_config, parse_config, ConfigError, OutputFormat, RunConfig};
pub use emit::{emit_report, parse_json_report, write_report};
pub use parser::{parse_vector_expr, EvalContext, Expr, ParseError, Value};
pub use run::{run_all, run_sections, Report, Sections, Summary, SCHEMA_VERSION, STRUCTURE_TOL};

/// Exit status when every non-skipped suite passed.
pub const EXIT_OK: i32 = 0;
/// Exit status when at least one suite failed.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;
