use std::io::Read;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Bumped whenever a field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

/// A file argument read into memory.
#[derive(Debug, Clone, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
    #[serde(skip)]
    pub text: String,
}

/// Reads every named input once; `-` is standard input and may appear at
/// most once.
#[derive(Debug, Default)]
pub struct Inputs {
    pub read: Vec<Input>,
    stdin_used: bool,
}

impl Inputs {
    pub fn load(&mut self, path: &str) -> Result<Input, CliError> {
        let text = if path == "-" {
            if std::mem::replace(&mut self.stdin_used, true) {
                return Err(CliError::Input(
                    "standard input can be read only once".into(),
                ));
            }
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("<stdin>: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?
        };
        let input = Input {
            path: path.to_string(),
            sha256: format!("{:x}", Sha256::digest(text.as_bytes())),
            bytes: text.len(),
            text,
        };
        self.read.push(input.clone());
        Ok(input)
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<Input>,
    pub parameters: Value,
    pub result: Value,
    pub exit_code: i32,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }
}
