//! Pipeline failures mapped to exit codes: 1 for input problems (unreadable
//! or malformed files, bad configuration), 2 for degenerate analyses (too
//! little structure to fit or score). Errors print as one-line JSON on
//! stderr so callers can machine-read them.

use std::fmt;

#[derive(Debug)]
pub enum PipelineError {
    /// Exit code 1.
    Input(String),
    /// Exit code 2.
    Degenerate(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input(_) => 1,
            PipelineError::Degenerate(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Input(_) => "input",
            PipelineError::Degenerate(_) => "degenerate",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            PipelineError::Input(m) | PipelineError::Degenerate(m) => m,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.message(),
            "kind": self.kind(),
        })
        .to_string()
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for PipelineError {}
