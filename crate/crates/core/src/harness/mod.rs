//! Experiment harness behind the command-line tool: configuration files,
//! game descriptions, seeded repetition, scoring and CSV output.

mod aggregate;
mod config;
mod exact;
mod experiment;
mod games;
mod rows;

pub use aggregate::{summarize, GroupSummary, MeanSe};
pub use config::{parse_config, ExperimentConfig};
pub use exact::{exact_report, ExactReport};
pub use experiment::{run_bench, run_pac, BenchReport, PacReport, PacSummary};
pub use games::{GameSpec, SharedGame};
pub use rows::{read_rows, ResultRow, ResultWriter, CSV_HEADER};
