//! Verification runs, alpha sweeps and pseudo-probability reports for the
//! Hardy reference-system model, rendered as JSON, CSV or text.

pub mod config;
pub mod report;
pub mod run;
pub mod serialize;

pub use config::{AlphaSpec, Command, GridSpec, OutputFormat, RunConfig};
pub use report::{ReportDocument, Row};
pub use run::{exit, exit_status, run};
pub use serialize::{parse_json, serialize};
