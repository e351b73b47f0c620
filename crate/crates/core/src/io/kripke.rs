//! Kripke structure files.
//!
//! ```text
//! states: c0 c1 c2
//! marked: c0
//! c0 -> c1
//! c1 -> c2
//! ```

use std::collections::HashSet;
use std::fmt::Write;

use crate::galois::KripkeStructure;

use super::{content_lines, header, syntax, NameTable, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeFile {
    pub structure: KripkeStructure,
    pub names: Vec<String>,
}

pub fn parse_kripke(text: &str) -> Result<KripkeFile, ParseError> {
    let mut states: Option<NameTable> = None;
    let mut marked = Vec::new();
    let mut marked_seen = false;
    let mut edges = Vec::new();
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
        let table = |name: &str| -> Result<&NameTable, ParseError> {
            states.as_ref().ok_or(ParseError::UnknownName {
                line,
                name: name.to_string(),
            })
        };
        if let Some(rest) = header(content, "marked") {
            if std::mem::replace(&mut marked_seen, true) {
                return Err(syntax(line, "duplicate `marked:` declaration"));
            }
            for tok in rest.split_whitespace() {
                marked.push(table(tok)?.lookup(line, tok)?);
            }
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let [src, "->", dst] = toks[..] else {
            return Err(syntax(line, "expected `src -> dst` or a declaration"));
        };
        let s = table(src)?.lookup(line, src)?;
        let t = table(dst)?.lookup(line, dst)?;
        if !seen.insert((s, t)) {
            return Err(syntax(line, format!("duplicate edge `{src} -> {dst}`")));
        }
        edges.push((s, t));
    }
    let states = states.ok_or(ParseError::MissingHeader("states"))?;
    let structure =
        KripkeStructure::new(states.len(), edges, marked).map_err(|e| ParseError::Galois {
            line: None,
            source: e,
        })?;
    Ok(KripkeFile {
        structure,
        names: states.into_names(),
    })
}

pub fn print_kripke(k: &KripkeStructure, names: &[String]) -> String {
    let mut out = String::new();
    writeln!(out, "states: {}", names.join(" ")).unwrap();
    if !k.marked().is_empty() {
        let marked: Vec<&str> = k.marked().iter().map(|&s| names[s].as_str()).collect();
        writeln!(out, "marked: {}", marked.join(" ")).unwrap();
    }
    for (s, t) in k.edges() {
        writeln!(out, "{} -> {}", names[s], names[t]).unwrap();
    }
    out
}
