//! Library surface behind the `cotrade` binary: configuration resolution,
//! the pipeline orchestrator, and exit-code mapping.

pub mod config;
pub mod error;
pub mod pipeline;

pub use config::{AnalysisOpts, PipelineConfig};
pub use error::PipelineError;
pub use pipeline::{run_pipeline, Report, Stages};
