//! Verification harness: builds a test operator, runs a theorem suite against
//! it and writes JSON and CSV reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Config, ConfigError, OperatorSource};
pub use report::{CheckResult, SuiteReport};
pub use suites::{run_suite, Suite};
