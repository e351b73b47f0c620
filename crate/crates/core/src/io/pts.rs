//! System files.
//!
//! ```text
//! states: s0 s1
//! actions: a b
//! s0 a s1 0.5      # src action dst probability
//! s0 a s0 1/2      # fractions are evaluated in floating point
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::linalg::Matrix;
use crate::pts::{LabelledPts, PtsError, DEFAULT_TOL};

use super::{content_lines, header, syntax, NameTable, ParseError};

/// Largest `states² × actions` a system file may declare.
pub const MAX_MATRIX_ENTRIES: usize = 1 << 24;

/// A parsed system together with its state names.
#[derive(Debug, Clone, PartialEq)]
pub struct PtsFile {
    pub system: LabelledPts,
    pub state_names: Vec<String>,
}

fn parse_probability(line: usize, tok: &str) -> Result<f64, ParseError> {
    let number = |s: &str| -> Result<f64, ParseError> {
        let v: f64 = s
            .parse()
            .map_err(|_| syntax(line, format!("invalid probability `{tok}`")))?;
        if !v.is_finite() {
            return Err(syntax(line, format!("invalid probability `{tok}`")));
        }
        Ok(v)
    };
    match tok.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (number(p)?, number(q)?);
            if q == 0.0 {
                return Err(syntax(line, format!("zero denominator in `{tok}`")));
            }
            Ok(p / q)
        }
        None => number(tok),
    }
}

/// Parses a system file and validates it with tolerance `tol`.
pub fn parse_pts(text: &str, tol: f64) -> Result<PtsFile, ParseError> {
    let mut states: Option<NameTable> = None;
    let mut actions: Option<NameTable> = None;
    let mut entries: Vec<(usize, usize, usize, f64, usize)> = Vec::new();
    let mut seen = HashSet::new();

    for (line, content) in content_lines(text) {
        if let Some(rest) = header(content, "states") {
            if states.is_some() {
                return Err(syntax(line, "duplicate `states:` declaration"));
            }
            let mut t = NameTable::default();
            t.declare_all(line, "state", rest)?;
            states = Some(t);
            continue;
        }
        if let Some(rest) = header(content, "actions") {
            if actions.is_some() {
                return Err(syntax(line, "duplicate `actions:` declaration"));
            }
            let mut t = NameTable::default();
            t.declare_all(line, "action", rest)?;
            actions = Some(t);
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let [src, act, dst, prob] = toks[..] else {
            return Err(syntax(
                line,
                "expected `src action dst probability` or a declaration",
            ));
        };
        let st = states.as_ref().ok_or(ParseError::UnknownName {
            line,
            name: src.to_string(),
        })?;
        let s = st.lookup(line, src)?;
        let a = actions
            .as_ref()
            .ok_or(ParseError::UnknownName {
                line,
                name: act.to_string(),
            })?
            .lookup(line, act)?;
        let t = st.lookup(line, dst)?;
        let p = parse_probability(line, prob)?;
        if !seen.insert((s, a, t)) {
            return Err(syntax(
                line,
                format!("duplicate transition `{src} {act} {dst}`"),
            ));
        }
        entries.push((s, a, t, p, line));
    }

    let states = states.ok_or(ParseError::MissingHeader("states"))?;
    let actions = actions.ok_or(ParseError::MissingHeader("actions"))?;
    let n = states.len();
    let size = n
        .checked_mul(n)
        .and_then(|x| x.checked_mul(actions.len()))
        .filter(|&x| x <= MAX_MATRIX_ENTRIES);
    if size.is_none() {
        return Err(ParseError::TooLarge(format!(
            "{n} states and {} actions",
            actions.len()
        )));
    }

    let mut matrices = vec![Matrix::zeros(n, n); actions.len()];
    // Last line that touched each (state, action) row, for diagnostics.
    let mut row_line: HashMap<(usize, usize), usize> = HashMap::new();
    let mut cell_line: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for &(s, a, t, p, line) in &entries {
        matrices[a][(s, t)] = p;
        row_line.insert((s, a), line);
        cell_line.insert((s, a, t), line);
    }
    let action_names = actions.into_names();
    let system = LabelledPts::new(n, action_names.clone(), matrices).map_err(|e| {
        ParseError::Validation {
            line: None,
            source: e,
        }
    })?;
    system.validate(tol).map_err(|e| {
        let idx = |name: &str| action_names.iter().position(|x| x == name).unwrap_or(0);
        let line = match &e {
            PtsError::RowSumInvalid { state, action, .. } => {
                row_line.get(&(*state, idx(action))).copied()
            }
            PtsError::NegativeEntry {
                action,
                state,
                target,
                ..
            }
            | PtsError::EntryOutOfRange {
                action,
                state,
                target,
                ..
            } => cell_line.get(&(*state, idx(action), *target)).copied(),
            _ => None,
        };
        ParseError::Validation { line, source: e }
    })?;
    Ok(PtsFile {
        system,
        state_names: states.into_names(),
    })
}

/// Renders a system in the format read by [`parse_pts`]. Probabilities use
/// the shortest decimal that reads back to the same `f64`.
pub fn print_pts(system: &LabelledPts, state_names: &[String]) -> String {
    assert_eq!(state_names.len(), system.n());
    let mut out = String::new();
    writeln!(out, "states: {}", state_names.join(" ")).unwrap();
    writeln!(out, "actions: {}", system.actions().join(" ")).unwrap();
    for s in 0..system.n() {
        for (a, m) in system.actions().iter().zip(system.matrices()) {
            for (t, &p) in m.row(s).iter().enumerate() {
                if p != 0.0 {
                    writeln!(out, "{} {a} {} {p}", state_names[s], state_names[t]).unwrap();
                }
            }
        }
    }
    out
}

/// Parses with the default tolerance.
impl std::str::FromStr for PtsFile {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pts(s, DEFAULT_TOL)
    }
}
