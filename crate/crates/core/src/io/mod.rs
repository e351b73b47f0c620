//! Line-oriented text formats for systems, partitions, Kripke structures,
//! relations and Galois connections.
//!
//! Every format shares the same lexical rules: `#` starts a comment that
//! runs to the end of the line, blank lines are ignored, and names are
//! whitespace-separated tokens that contain none of `# : { } ,` and are not
//! the operator tokens `->` or `<=`. Errors carry 1-based line numbers.

mod galois;
mod kripke;
mod partition;
mod pts;

use std::collections::HashMap;

use thiserror::Error;

use crate::galois::{GaloisError, LatticeError};
use crate::pts::PtsError;

pub use galois::{parse_galois, print_galois, GaloisFile};
pub use kripke::{parse_kripke, print_kripke, KripkeFile};
pub use partition::{parse_partition, parse_relation, print_partition, print_relation};
pub use pts::{parse_pts, print_pts, PtsFile, MAX_MATRIX_ENTRIES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown name `{name}`")]
    UnknownName { line: usize, name: String },
    #[error("missing `{0}:` declaration")]
    MissingHeader(&'static str),
    #[error("line {line}: not a lattice: {source}")]
    NotALattice { line: usize, source: LatticeError },
    #[error("{}{source}", fmt_line(*line))]
    Validation {
        line: Option<usize>,
        source: PtsError,
    },
    #[error("{}{source}", fmt_line(*line))]
    Galois {
        line: Option<usize>,
        source: GaloisError,
    },
    #[error("input too large: {0}")]
    TooLarge(String),
}

fn fmt_line(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

impl ParseError {
    /// 1-based line the error refers to, when known.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::UnknownName { line, .. }
            | ParseError::NotALattice { line, .. } => Some(*line),
            ParseError::Validation { line, .. } | ParseError::Galois { line, .. } => *line,
            ParseError::MissingHeader(_) | ParseError::TooLarge(_) => None,
        }
    }
}

pub(crate) fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with comments stripped, paired with 1-based numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// If `line` is `key: rest`, returns `rest`.
pub(crate) fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let rest = line.strip_prefix(key)?.trim_start();
    rest.strip_prefix(':')
}

pub(crate) fn is_valid_name(tok: &str) -> bool {
    !tok.is_empty()
        && tok != "->"
        && tok != "<="
        && !tok
            .chars()
            .any(|c| matches!(c, '#' | ':' | '{' | '}' | ',') || c.is_whitespace())
}

/// Ordered name declarations with O(1) lookup.
#[derive(Debug, Clone, Default)]
pub(crate) struct NameTable {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NameTable {
    pub fn declare(&mut self, line: usize, what: &str, name: &str) -> Result<usize, ParseError> {
        if !is_valid_name(name) {
            return Err(syntax(line, format!("invalid {what} name `{name}`")));
        }
        if self.index.contains_key(name) {
            return Err(syntax(line, format!("duplicate {what} `{name}`")));
        }
        self.index.insert(name.to_string(), self.names.len());
        self.names.push(name.to_string());
        Ok(self.names.len() - 1)
    }

    pub fn declare_all(&mut self, line: usize, what: &str, list: &str) -> Result<(), ParseError> {
        for tok in list.split_whitespace() {
            self.declare(line, what, tok)?;
        }
        Ok(())
    }

    pub fn lookup(&self, line: usize, name: &str) -> Result<usize, ParseError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::UnknownName {
                line,
                name: name.to_string(),
            })
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }

    pub fn from_names(line: usize, what: &str, names: &[String]) -> Result<Self, ParseError> {
        let mut t = NameTable::default();
        for n in names {
            t.declare(line, what, n)?;
        }
        Ok(t)
    }
}

/// `s0 s1 ... s{n-1}`.
pub fn default_state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}
