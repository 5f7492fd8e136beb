//! Command-line plumbing around the `cmc` library: analysis configuration,
//! CSV input and output, the bidirectional pipeline, benchmark experiments
//! and figure reproductions.

pub mod config;
pub mod csv_io;
pub mod error;
pub mod experiments;
pub mod figures;
pub mod pipeline;

pub use config::AnalysisConfig;
pub use error::{CliError, Result};
pub use pipeline::{run_pipeline, run_realizations, ResultBundle};
