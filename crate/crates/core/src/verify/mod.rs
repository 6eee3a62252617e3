//! Named check suites, their configuration and the reports they produce.

mod checks;
mod config;
mod report;
mod run;

pub use checks::{registry, CheckDef, Ctx, Expectation, Outcome, Suite};
pub use config::{Coefficient, OutputConfig, ReportFormat, SuiteConfig, MODEL_NAMES};
pub use report::{CheckRecord, FlagsRecord, Metadata, SpectrumRecord, Status, Timing, VerificationReport};
pub use run::{run_suite, select_checks, write_outputs};
