//! Galois connection files.
//!
//! ```text
//! concrete: c0 c1            # optional; otherwise taken from `alpha:` lines
//! abstract: bot top
//! leq: bot <= top            # chains like `a <= b <= c` are allowed
//! alpha: c0 bot              # abstraction of a single concrete state
//! alpha: c1 top
//! alpha: {c0 c1} top         # explicit value for a subset, overriding the join
//! ```

use std::fmt::Write;

use crate::galois::{FiniteLattice, GaloisSpec, Subset};

use super::{content_lines, header, syntax, NameTable, ParseError};

/// Largest abstract lattice a file may declare.
pub const MAX_ABSTRACT: usize = 256;
/// Largest concrete carrier a file may declare.
pub const MAX_CONCRETE: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisFile {
    pub spec: GaloisSpec,
    pub concrete_names: Vec<String>,
}

enum Resolved {
    State(usize),
    Set(Subset),
}

enum AlphaTarget<'a> {
    Single(&'a str),
    Subset(Vec<&'a str>),
}

fn parse_alpha(line: usize, rest: &str) -> Result<(AlphaTarget<'_>, &str), ParseError> {
    let rest = rest.trim();
    if let Some(inner) = rest.strip_prefix('{') {
        let (members, elem) = inner
            .split_once('}')
            .ok_or_else(|| syntax(line, "unterminated `{`"))?;
        let elem = elem.trim();
        if elem.is_empty() || elem.contains(char::is_whitespace) {
            return Err(syntax(line, "expected `alpha: {states} element`"));
        }
        let members = members
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        return Ok((AlphaTarget::Subset(members), elem));
    }
    let toks: Vec<&str> = rest.split_whitespace().collect();
    let [state, elem] = toks[..] else {
        return Err(syntax(line, "expected `alpha: state element`"));
    };
    Ok((AlphaTarget::Single(state), elem))
}

pub fn parse_galois(text: &str) -> Result<GaloisFile, ParseError> {
    let mut concrete: Option<NameTable> = None;
    let mut implicit = NameTable::default();
    let mut abs: Option<NameTable> = None;
    let mut pairs = Vec::new();
    let mut last_leq_line = None;
    // (line, target, element) kept until all names are known.
    let mut alphas = Vec::new();

    for (line, content) in content_lines(text) {
        if let Some(rest) = header(content, "concrete") {
            if concrete.is_some() {
                return Err(syntax(line, "duplicate `concrete:` declaration"));
            }
            if !alphas.is_empty() {
                return Err(syntax(line, "`concrete:` must precede `alpha:` lines"));
            }
            let mut t = NameTable::default();
            t.declare_all(line, "concrete state", rest)?;
            if t.len() > MAX_CONCRETE {
                return Err(ParseError::TooLarge(format!(
                    "{} concrete states (limit {MAX_CONCRETE})",
                    t.len()
                )));
            }
            concrete = Some(t);
        } else if let Some(rest) = header(content, "abstract") {
            if abs.is_some() {
                return Err(syntax(line, "duplicate `abstract:` declaration"));
            }
            let mut t = NameTable::default();
            t.declare_all(line, "abstract element", rest)?;
            if t.len() > MAX_ABSTRACT {
                return Err(ParseError::TooLarge(format!(
                    "{} abstract elements (limit {MAX_ABSTRACT})",
                    t.len()
                )));
            }
            abs = Some(t);
        } else if let Some(rest) = header(content, "leq") {
            let table = abs
                .as_ref()
                .ok_or_else(|| syntax(line, "`leq:` before `abstract:`"))?;
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() < 3 || toks.len().is_multiple_of(2) {
                return Err(syntax(line, "expected `leq: x <= y`"));
            }
            let mut prev = table.lookup(line, toks[0])?;
            for chunk in toks[1..].chunks(2) {
                if chunk[0] != "<=" {
                    return Err(syntax(line, format!("expected `<=`, found `{}`", chunk[0])));
                }
                let next = table.lookup(line, chunk[1])?;
                pairs.push((prev, next));
                prev = next;
            }
            last_leq_line = Some(line);
        } else if let Some(rest) = header(content, "alpha") {
            let (target, elem) = parse_alpha(line, rest)?;
            let explicit = concrete.is_some();
            let table = concrete.as_mut().unwrap_or(&mut implicit);
            let resolve = |t: &mut NameTable, name: &str| -> Result<usize, ParseError> {
                if explicit {
                    t.lookup(line, name)
                } else {
                    match t.get(name) {
                        Some(i) => Ok(i),
                        None => t.declare(line, "concrete state", name),
                    }
                }
            };
            let target = match target {
                AlphaTarget::Single(s) => Resolved::State(resolve(table, s)?),
                AlphaTarget::Subset(members) => {
                    let mut mask: Subset = 0;
                    for m in members {
                        let i = resolve(table, m)?;
                        if i >= MAX_CONCRETE {
                            return Err(ParseError::TooLarge(format!(
                                "more than {MAX_CONCRETE} concrete states"
                            )));
                        }
                        mask |= 1 << i;
                    }
                    Resolved::Set(mask)
                }
            };
            alphas.push((line, target, elem.to_string()));
        } else {
            return Err(syntax(
                line,
                "expected a `concrete:`, `abstract:`, `leq:` or `alpha:` line",
            ));
        }
    }

    let abs = abs.ok_or(ParseError::MissingHeader("abstract"))?;
    let concrete = concrete.unwrap_or(implicit);
    if concrete.len() > MAX_CONCRETE {
        return Err(ParseError::TooLarge(format!(
            "{} concrete states (limit {MAX_CONCRETE})",
            concrete.len()
        )));
    }
    let abs_names = abs.clone().into_names();
    let lattice =
        FiniteLattice::from_pairs(abs_names, pairs).map_err(|source| ParseError::NotALattice {
            line: last_leq_line.unwrap_or(1),
            source,
        })?;

    let n = concrete.len();
    let names = concrete.into_names();
    let mut singleton: Vec<Option<usize>> = vec![None; n];
    let mut overrides: Vec<(usize, Subset, usize)> = Vec::new();
    for (line, target, elem) in &alphas {
        let e = abs.lookup(*line, elem)?;
        match *target {
            Resolved::State(c) => {
                if singleton[c].replace(e).is_some() {
                    return Err(syntax(
                        *line,
                        format!("duplicate `alpha:` for `{}`", names[c]),
                    ));
                }
            }
            Resolved::Set(mask) => {
                if overrides.iter().any(|&(_, m, _)| m == mask) {
                    return Err(syntax(*line, "duplicate `alpha:` for the same subset"));
                }
                overrides.push((*line, mask, e));
            }
        }
    }
    // A braced singleton also serves as the base value when no plain line exists.
    for &(_, mask, e) in &overrides {
        if mask.count_ones() == 1 {
            let c = mask.trailing_zeros() as usize;
            singleton[c].get_or_insert(e);
        }
    }
    let mut alpha_singleton = Vec::with_capacity(n);
    for (c, e) in singleton.into_iter().enumerate() {
        match e {
            Some(e) => alpha_singleton.push(e),
            None => {
                return Err(syntax(
                    text.lines().count().max(1),
                    format!("no `alpha:` line for concrete state `{}`", names[c]),
                ))
            }
        }
    }
    let mut spec = GaloisSpec::new(lattice, alpha_singleton)
        .map_err(|source| ParseError::Galois { line: None, source })?;
    for (line, mask, e) in overrides {
        spec = spec
            .with_override(mask, e)
            .map_err(|source| ParseError::Galois {
                line: Some(line),
                source,
            })?;
    }
    Ok(GaloisFile {
        spec,
        concrete_names: names,
    })
}

/// Renders a connection in the format read by [`parse_galois`]. The order
/// is written as its full relation, one `leq:` line per strict pair.
pub fn print_galois(g: &GaloisSpec, concrete_names: &[String]) -> String {
    let l = g.lattice();
    let mut out = String::new();
    writeln!(out, "concrete: {}", concrete_names.join(" ")).unwrap();
    writeln!(out, "abstract: {}", l.names().join(" ")).unwrap();
    for x in 0..l.len() {
        for y in 0..l.len() {
            if x != y && l.leq(x, y) {
                writeln!(out, "leq: {} <= {}", l.name(x), l.name(y)).unwrap();
            }
        }
    }
    for (c, &e) in g.alpha_singleton().iter().enumerate() {
        writeln!(out, "alpha: {} {}", concrete_names[c], l.name(e)).unwrap();
    }
    for (&mask, &e) in g.overrides() {
        let members: Vec<&str> = (0..concrete_names.len())
            .filter(|c| mask & (1 << c) != 0)
            .map(|c| concrete_names[c].as_str())
            .collect();
        writeln!(out, "alpha: {{{}}} {}", members.join(" "), l.name(e)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::{check_galois, GaloisViolation, LatticeError};

    #[test]
    fn two_point() {
        let f = parse_galois("abstract: bot top\nleq: bot <= top\nalpha: c0 top").unwrap();
        assert_eq!(f.concrete_names, vec!["c0"]);
        assert_eq!(f.spec.lattice().len(), 2);
        assert_eq!(f.spec.alpha(0b1), 1);
        assert_eq!(f.spec.alpha(0), 0);
        assert_eq!(check_galois(&f.spec, 16).unwrap(), None);
    }

    #[test]
    fn cycle_is_not_a_lattice() {
        let err =
            parse_galois("abstract: x y\nleq: x <= y\nleq: y <= x\nalpha: c x\n").unwrap_err();
        assert!(matches!(
            err,
            ParseError::NotALattice {
                line: 3,
                source: LatticeError::NotAntisymmetric(..)
            }
        ));
    }

    #[test]
    fn chains_and_overrides_round_trip() {
        let text = "\
concrete: p q
abstract: none one both
leq: none <= one <= both
alpha: p one
alpha: q one
alpha: {p q} both
";
        let f = parse_galois(text).unwrap();
        assert!(f.spec.lattice().leq(0, 2));
        assert_eq!(f.spec.alpha(0b11), 2);
        let again = parse_galois(&print_galois(&f.spec, &f.concrete_names)).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn remapped_singleton_in_full_table_is_caught() {
        let text = "\
abstract: e x0 x1 both
leq: e <= x0 <= both
leq: e <= x1 <= both
alpha: c0 x0
alpha: c1 x1
alpha: {c0 c1} both
";
        let f = parse_galois(text).unwrap();
        assert_eq!(check_galois(&f.spec, 16).unwrap(), None);
        let f = parse_galois(&format!("{text}alpha: {{c0}} x1\n")).unwrap();
        assert_eq!(
            check_galois(&f.spec, 16).unwrap(),
            Some(GaloisViolation::NotReductive { element: 2 })
        );
        assert!(parse_galois("abstract: {0}\n").is_err());
    }

    #[test]
    fn errors() {
        let cases: [(&str, Option<usize>); 7] = [
            ("abstract: a\nalpha: c b\n", Some(2)),
            ("abstract: a\nleq: a <\n", Some(2)),
            ("abstract: a\nleq: a < a\n", Some(2)),
            ("concrete: c\nabstract: a\nalpha: d a\n", Some(2 + 1)),
            ("abstract: a\nalpha: c a\nalpha: c a\n", Some(3)),
            ("abstract: a\nalpha: {c a\n", Some(2)),
            ("abstract: a\nbogus\n", Some(2)),
        ];
        for (text, line) in cases {
            let err = parse_galois(text).unwrap_err();
            assert_eq!(err.line(), line, "{text:?} -> {err}");
        }
        assert_eq!(
            parse_galois("alpha: c a\n").unwrap_err(),
            ParseError::MissingHeader("abstract")
        );
        let err = parse_galois("concrete: c d\nabstract: a\nalpha: c a\n").unwrap_err();
        assert!(err.to_string().contains("`d`"), "{err}");
    }
}
