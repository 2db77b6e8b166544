//! Report rendering: every command produces one [`CommandOutput`] holding a
//! plain-text body and an equivalent JSON value, plus the overall verdict.
//! Output is deterministic — collections are emitted in canonical order and
//! JSON objects are serialized with sorted keys — so identical inputs yield
//! byte-identical reports.

use clap::ValueEnum;
use serde_json::Value;

/// Output format selected by `--report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

/// The rendered outcome of one command.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    /// Plain-text report, one trailing newline handled by the printer.
    pub text: String,
    /// The same report as a JSON value.
    pub json: Value,
    /// Overall verdict: `false` turns into exit code 1.
    pub pass: bool,
}

impl CommandOutput {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Text => self.text.clone(),
            ReportFormat::Json => {
                serde_json::to_string_pretty(&self.json).expect("reports serialize")
            }
        }
    }
}

/// `pass` / `FAIL` marker used throughout the text reports.
pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}
