//! Simulations between Kripke structures and Galois connections between the
//! powerset of concrete states and a finite abstract lattice.
//!
//! An abstraction is given by the image `α({c})` of every concrete state.
//! `α` extends to all subsets by joins, and the concretisation is derived:
//! `γ(a) = { c | α({c}) ⊑ a }`. Explicit images for larger subsets may be
//! supplied as overrides; they are then checked against the Galois
//! connection laws instead of being trusted.

mod kripke;
mod lattice;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kripke::{
    check_simulation, is_simulation, largest_simulation, KripkeStructure, Relation,
    SimCounterexample,
};
pub use lattice::{FiniteLattice, LatticeError};

/// Subset of concrete states as a bitmask.
pub type Subset = u64;

/// Default limit on concrete states for powerset enumeration.
pub const DEFAULT_POWERSET_CAP: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("powerset of {n} concrete states exceeds the limit of {cap}")]
    CarrierTooLarge { n: usize, cap: usize },
    #[error("not a Galois connection: {0}")]
    NotGalois(GaloisViolation),
    #[error("state {state} out of range for {n} states")]
    StateOutOfRange { state: usize, n: usize },
    #[error("abstract element {elem} out of range for {len} elements")]
    ElementOutOfRange { elem: usize, len: usize },
    #[error("relation pair {pair:?} out of range")]
    RelationOutOfRange { pair: (usize, usize) },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Formats a subset bitmask as `{0,2}`.
pub fn format_subset(s: Subset) -> String {
    let members: Vec<String> = (0..64)
        .filter(|b| s & (1u64 << b) != 0)
        .map(|b| b.to_string())
        .collect();
    format!("{{{}}}", members.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisSpec {
    concrete_n: usize,
    lattice: FiniteLattice,
    alpha_singleton: Vec<usize>,
    overrides: BTreeMap<Subset, usize>,
}

impl GaloisSpec {
    pub fn new(lattice: FiniteLattice, alpha_singleton: Vec<usize>) -> Result<Self, GaloisError> {
        let concrete_n = alpha_singleton.len();
        if concrete_n > 63 {
            return Err(GaloisError::CarrierTooLarge {
                n: concrete_n,
                cap: 63,
            });
        }
        if let Some(&elem) = alpha_singleton.iter().find(|&&e| e >= lattice.len()) {
            return Err(GaloisError::ElementOutOfRange {
                elem,
                len: lattice.len(),
            });
        }
        Ok(GaloisSpec {
            concrete_n,
            lattice,
            alpha_singleton,
            overrides: BTreeMap::new(),
        })
    }

    /// Fixes `α(subset) = elem` instead of the join of its singletons.
    pub fn with_override(mut self, subset: Subset, elem: usize) -> Result<Self, GaloisError> {
        if elem >= self.lattice.len() {
            return Err(GaloisError::ElementOutOfRange {
                elem,
                len: self.lattice.len(),
            });
        }
        if subset >> self.concrete_n != 0 {
            return Err(GaloisError::StateOutOfRange {
                state: 63 - subset.leading_zeros() as usize,
                n: self.concrete_n,
            });
        }
        self.overrides.insert(subset, elem);
        Ok(self)
    }

    pub fn concrete_n(&self) -> usize {
        self.concrete_n
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn alpha_singleton(&self) -> &[usize] {
        &self.alpha_singleton
    }

    pub fn overrides(&self) -> &BTreeMap<Subset, usize> {
        &self.overrides
    }

    fn alpha_point(&self, c: usize) -> usize {
        self.overrides
            .get(&(1 << c))
            .copied()
            .unwrap_or(self.alpha_singleton[c])
    }

    /// Abstraction of a subset of concrete states.
    pub fn alpha(&self, s: Subset) -> usize {
        if let Some(&e) = self.overrides.get(&s) {
            return e;
        }
        self.lattice.join_all(
            (0..self.concrete_n)
                .filter(|c| s & (1 << c) != 0)
                .map(|c| self.alpha_point(c)),
        )
    }

    /// Concretisation: all concrete states whose abstraction lies below `elem`.
    pub fn gamma(&self, elem: usize) -> Subset {
        (0..self.concrete_n)
            .filter(|&c| self.lattice.leq(self.alpha_point(c), elem))
            .fold(0, |acc, c| acc | (1 << c))
    }

    fn check_cap(&self, cap: usize) -> Result<(), GaloisError> {
        if self.concrete_n > cap {
            return Err(GaloisError::CarrierTooLarge {
                n: self.concrete_n,
                cap,
            });
        }
        Ok(())
    }

    fn all_subsets(&self) -> std::ops::Range<Subset> {
        0..(1 << self.concrete_n)
    }
}

/// First failure of the Galois connection laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaloisViolation {
    /// `smaller ⊆ larger` but `α(smaller) ⋢ α(larger)`.
    AlphaNotMonotone { smaller: Subset, larger: Subset },
    /// `lower ⊑ upper` but `γ(lower) ⊄ γ(upper)`.
    GammaNotMonotone { lower: usize, upper: usize },
    /// `subset ⊄ γ(α(subset))`.
    NotExtensive { subset: Subset },
    /// `α(γ(element)) ⋢ element`.
    NotReductive { element: usize },
}

impl fmt::Display for GaloisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GaloisViolation::AlphaNotMonotone { smaller, larger } => write!(
                f,
                "alpha is not monotone: {} is contained in {} but its image is not below",
                format_subset(smaller),
                format_subset(larger)
            ),
            GaloisViolation::GammaNotMonotone { lower, upper } => write!(
                f,
                "gamma is not monotone between elements {lower} and {upper}"
            ),
            GaloisViolation::NotExtensive { subset } => write!(
                f,
                "{} is not contained in gamma(alpha of it)",
                format_subset(subset)
            ),
            GaloisViolation::NotReductive { element } => {
                write!(f, "alpha(gamma({element})) is not below element {element}")
            }
        }
    }
}

/// Verifies monotonicity of `α` and `γ` and both composite inequalities over
/// the whole powerset. Violations are reported in that order, smallest
/// witness first.
pub fn check_galois(g: &GaloisSpec, cap: usize) -> Result<Option<GaloisViolation>, GaloisError> {
    g.check_cap(cap)?;
    let l = g.lattice();
    let alpha: Vec<usize> = g.all_subsets().map(|s| g.alpha(s)).collect();

    // Monotone iff monotone along every single-element extension.
    for s in g.all_subsets() {
        for c in 0..g.concrete_n() {
            let bigger = s | (1 << c);
            if bigger != s && !l.leq(alpha[s as usize], alpha[bigger as usize]) {
                return Ok(Some(GaloisViolation::AlphaNotMonotone {
                    smaller: s,
                    larger: bigger,
                }));
            }
        }
    }
    let gamma: Vec<Subset> = (0..l.len()).map(|e| g.gamma(e)).collect();
    for x in 0..l.len() {
        for y in 0..l.len() {
            if l.leq(x, y) && gamma[x] & !gamma[y] != 0 {
                return Ok(Some(GaloisViolation::GammaNotMonotone {
                    lower: x,
                    upper: y,
                }));
            }
        }
    }
    for s in g.all_subsets() {
        if s & !gamma[alpha[s as usize]] != 0 {
            return Ok(Some(GaloisViolation::NotExtensive { subset: s }));
        }
    }
    for e in 0..l.len() {
        if !l.leq(alpha[gamma[e] as usize], e) {
            return Ok(Some(GaloisViolation::NotReductive { element: e }));
        }
    }
    Ok(None)
}

fn require_galois(g: &GaloisSpec, cap: usize) -> Result<(), GaloisError> {
    match check_galois(g, cap)? {
        Some(v) => Err(GaloisError::NotGalois(v)),
        None => Ok(()),
    }
}

/// All pairs `(S, a)` with `α(S) ⊑ a`, optionally restricted to one `a`.
pub fn induced_relation(
    g: &GaloisSpec,
    only: Option<usize>,
    cap: usize,
) -> Result<Vec<(Subset, usize)>, GaloisError> {
    require_galois(g, cap)?;
    let l = g.lattice();
    if let Some(e) = only.filter(|&e| e >= l.len()) {
        return Err(GaloisError::ElementOutOfRange {
            elem: e,
            len: l.len(),
        });
    }
    let mut out = Vec::new();
    for s in g.all_subsets() {
        let image = g.alpha(s);
        for e in 0..l.len() {
            if only.is_none_or(|o| o == e) && l.leq(image, e) {
                out.push((s, e));
            }
        }
    }
    Ok(out)
}

/// A related pair `(S, a)` whose concrete step `S → post(S)` has no
/// abstract match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisCounterexample {
    pub subset: Subset,
    pub element: usize,
}

/// Checks that the induced relation `S R a ⇔ α(S) ⊑ a` simulates the
/// subset lift of `c` (each non-empty `S` steps to `post(S)` when that is
/// non-empty) by `a_struct`. `state_of_element[e]` is the abstract state
/// standing for lattice element `e`; it must be a bijection.
pub fn check_abstraction_basis(
    c: &KripkeStructure,
    a_struct: &KripkeStructure,
    g: &GaloisSpec,
    state_of_element: &[usize],
    cap: usize,
) -> Result<Option<BasisCounterexample>, GaloisError> {
    require_galois(g, cap)?;
    let l = g.lattice();
    if c.n() != g.concrete_n() {
        return Err(GaloisError::SizeMismatch(format!(
            "concrete structure has {} states, abstraction covers {}",
            c.n(),
            g.concrete_n()
        )));
    }
    if state_of_element.len() != l.len() || a_struct.n() != l.len() {
        return Err(GaloisError::SizeMismatch(format!(
            "abstract structure has {} states for {} lattice elements",
            a_struct.n(),
            l.len()
        )));
    }
    let mut element_of_state = vec![usize::MAX; a_struct.n()];
    for (e, &st) in state_of_element.iter().enumerate() {
        if st >= a_struct.n() {
            return Err(GaloisError::StateOutOfRange {
                state: st,
                n: a_struct.n(),
            });
        }
        if element_of_state[st] != usize::MAX {
            return Err(GaloisError::SizeMismatch(format!(
                "abstract state {st} stands for more than one element"
            )));
        }
        element_of_state[st] = e;
    }
    for s in g.all_subsets().skip(1) {
        let post = c.post(s);
        if post == 0 {
            continue;
        }
        let from = g.alpha(s);
        let to = g.alpha(post);
        for e in (0..l.len()).filter(|&e| l.leq(from, e)) {
            let matched = a_struct
                .successors(state_of_element[e])
                .iter()
                .any(|&st| l.leq(to, element_of_state[st]));
            if !matched {
                return Ok(Some(BasisCounterexample {
                    subset: s,
                    element: e,
                }));
            }
        }
    }
    Ok(None)
}
