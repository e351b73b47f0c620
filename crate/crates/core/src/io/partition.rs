//! Partition and relation files.
//!
//! A partition lists one block per line over names taken from a system:
//!
//! ```text
//! block: s0 s2
//! block: s1
//! ```
//!
//! A relation between the states of two structures is one `concrete abstract`
//! pair per line.

use std::collections::HashSet;
use std::fmt::Write;

use crate::galois::Relation;
use crate::pts::Partition;

use super::{content_lines, header, syntax, NameTable, ParseError};

/// Parses a partition of the states named in `names`.
pub fn parse_partition(text: &str, names: &[String]) -> Result<Partition, ParseError> {
    let table = NameTable::from_names(0, "state", names)?;
    let mut owner: Vec<Option<usize>> = vec![None; names.len()];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut last_line = 0;
    for (line, content) in content_lines(text) {
        last_line = line;
        let rest =
            header(content, "block").ok_or_else(|| syntax(line, "expected `block: state ...`"))?;
        let mut block = Vec::new();
        for tok in rest.split_whitespace() {
            let s = table.lookup(line, tok)?;
            if owner[s].replace(blocks.len()).is_some() {
                return Err(syntax(line, format!("state `{tok}` appears in two blocks")));
            }
            block.push(s);
        }
        if block.is_empty() {
            return Err(syntax(line, "empty block"));
        }
        blocks.push(block);
    }
    if let Some(s) = owner.iter().position(Option::is_none) {
        return Err(syntax(
            last_line.max(1),
            format!("state `{}` is not in any block", names[s]),
        ));
    }
    Partition::new(names.len(), blocks)
        .map_err(|source| ParseError::Validation { line: None, source })
}

pub fn print_partition(p: &Partition, names: &[String]) -> String {
    let mut out = String::new();
    for block in p.blocks() {
        let members: Vec<&str> = block.iter().map(|&s| names[s].as_str()).collect();
        writeln!(out, "block: {}", members.join(" ")).unwrap();
    }
    out
}

/// Parses a relation from states named in `concrete` to states named in
/// `abs`. Repeated pairs are rejected.
pub fn parse_relation(
    text: &str,
    concrete: &[String],
    abs: &[String],
) -> Result<Relation, ParseError> {
    let ct = NameTable::from_names(0, "concrete state", concrete)?;
    let at = NameTable::from_names(0, "abstract state", abs)?;
    let mut seen = HashSet::new();
    for (line, content) in content_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        let [c, a] = toks[..] else {
            return Err(syntax(line, "expected `concrete abstract`"));
        };
        let pair = (ct.lookup(line, c)?, at.lookup(line, a)?);
        if !seen.insert(pair) {
            return Err(syntax(line, format!("duplicate pair `{c} {a}`")));
        }
    }
    Ok(seen.into_iter().collect())
}

pub fn print_relation(r: &Relation, concrete: &[String], abs: &[String]) -> String {
    let mut out = String::new();
    for (c, a) in r.iter() {
        writeln!(out, "{} {}", concrete[c], abs[a]).unwrap();
    }
    out
}
