use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;

pub const TOOL: &str = "stieltjes";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorObject {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorObject {
    fn from(e: &Error) -> Self {
        ErrorObject { kind: e.kind().to_string(), message: e.to_string() }
    }
}

/// What every subcommand writes to standard output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    /// arguments after the program name
    pub command: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// SHA-256 of the canonical JSON of the parsed input
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
    /// seconds since the Unix epoch; the only field that varies between
    /// identical runs
    pub timestamp: u64,
}

impl ReportDocument {
    pub fn new(command: Vec<String>, seed: Option<u64>, canonical_input: &str) -> Self {
        ReportDocument {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command,
            seed,
            inputs_digest: digest(canonical_input),
            results: None,
            error: None,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    /// A copy with the timestamp zeroed, for comparing runs.
    pub fn without_timestamp(&self) -> Self {
        ReportDocument { timestamp: 0, ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}
