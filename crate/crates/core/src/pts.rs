//! Labelled probabilistic transition systems, partitions and classifications.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;

/// Default comparison tolerance for probabilities.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PtsError {
    #[error("system has no actions")]
    EmptyActionSet,
    #[error("system has no states")]
    NoStates,
    #[error("negative probability {value} at action `{action}`, entry ({state}, {target})")]
    NegativeEntry {
        action: String,
        state: usize,
        target: usize,
        value: f64,
    },
    #[error("probability {value} out of range at action `{action}`, entry ({state}, {target})")]
    EntryOutOfRange {
        action: String,
        state: usize,
        target: usize,
        value: f64,
    },
    #[error("row {state} of action `{action}` sums to {sum}, expected 0 or 1")]
    RowSumInvalid {
        state: usize,
        action: String,
        sum: f64,
    },
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("class {class} has no members")]
    NonSurjective { class: usize },
    #[error("state {state} assigned to class {class}, but only {m} classes exist")]
    ClassOutOfRange {
        state: usize,
        class: usize,
        m: usize,
    },
    #[error("partition has an empty block")]
    EmptyBlock,
    #[error("state {0} appears in more than one block")]
    Overlap(usize),
    #[error("state {0} is not covered by any block")]
    Uncovered(usize),
    #[error("state {state} out of range for {n} states")]
    StateOutOfRange { state: usize, n: usize },
}

/// A finite reactive probabilistic transition system: one `n × n`
/// sub-stochastic matrix per action. Row `s` of the matrix for action `a` is
/// either all zero (`a` is disabled in `s`) or a probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelledPts {
    n: usize,
    actions: Vec<String>,
    matrices: Vec<Matrix>,
}

/// Whether row `s` of `m` carries a distribution rather than the zero row.
/// Only meaningful for systems that passed [`LabelledPts::validate`].
#[inline]
pub fn row_enabled(m: &Matrix, s: usize) -> bool {
    m.row_sum(s) > 0.5
}

impl LabelledPts {
    /// Checks shapes only; probability constraints are checked by
    /// [`validate`](Self::validate).
    pub fn new(n: usize, actions: Vec<String>, matrices: Vec<Matrix>) -> Result<Self, PtsError> {
        if actions.len() != matrices.len() {
            return Err(PtsError::DimensionMismatch(format!(
                "{} actions but {} matrices",
                actions.len(),
                matrices.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for a in &actions {
            if !seen.insert(a.as_str()) {
                return Err(PtsError::DuplicateAction(a.clone()));
            }
        }
        for (a, m) in actions.iter().zip(&matrices) {
            if m.rows() != n || m.cols() != n {
                return Err(PtsError::DimensionMismatch(format!(
                    "matrix for `{a}` is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(LabelledPts {
            n,
            actions,
            matrices,
        })
    }

    /// Single-action system labelled `a`.
    pub fn single_action(m: Matrix) -> Self {
        LabelledPts::new(m.rows(), vec!["a".to_string()], vec![m]).expect("square matrix")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn matrix(&self, action: &str) -> Option<&Matrix> {
        self.action_index(action).map(|i| &self.matrices[i])
    }

    pub fn action_index(&self, action: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == action)
    }

    pub fn is_enabled(&self, action: usize, state: usize) -> bool {
        row_enabled(&self.matrices[action], state)
    }

    /// Checks entries are in `[0, 1 + tol]` and every row sums to 0 or 1
    /// within `tol`.
    pub fn validate(&self, tol: f64) -> Result<(), PtsError> {
        if self.actions.is_empty() {
            return Err(PtsError::EmptyActionSet);
        }
        if self.n == 0 {
            return Err(PtsError::NoStates);
        }
        for (a, m) in self.actions.iter().zip(&self.matrices) {
            for s in 0..self.n {
                for (t, &x) in m.row(s).iter().enumerate() {
                    if x < 0.0 {
                        return Err(PtsError::NegativeEntry {
                            action: a.clone(),
                            state: s,
                            target: t,
                            value: x,
                        });
                    }
                    if !(x <= 1.0 + tol) {
                        return Err(PtsError::EntryOutOfRange {
                            action: a.clone(),
                            state: s,
                            target: t,
                            value: x,
                        });
                    }
                }
                let sum = m.row_sum(s);
                if sum.abs() > tol && (sum - 1.0).abs() > tol {
                    return Err(PtsError::RowSumInvalid {
                        state: s,
                        action: a.clone(),
                        sum,
                    });
                }
            }
        }
        Ok(())
    }

    /// The same system over a larger alphabet; actions missing from `self`
    /// become all-zero matrices. `actions` must contain every action of
    /// `self`.
    pub fn with_actions(&self, actions: &[String]) -> Result<LabelledPts, PtsError> {
        if let Some(missing) = self.actions.iter().find(|a| !actions.contains(a)) {
            return Err(PtsError::DimensionMismatch(format!(
                "target alphabet lacks action `{missing}`"
            )));
        }
        let matrices = actions
            .iter()
            .map(|a| {
                self.matrix(a)
                    .cloned()
                    .unwrap_or_else(|| Matrix::zeros(self.n, self.n))
            })
            .collect();
        LabelledPts::new(self.n, actions.to_vec(), matrices)
    }
}

/// `a`'s actions in order, followed by the actions only `b` has.
pub fn union_alphabet(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for x in b {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

/// Block-diagonal union of two systems. States of `p2` are shifted by the
/// returned offset, which equals `p1.n()`.
pub fn disjoint_union(p1: &LabelledPts, p2: &LabelledPts) -> (LabelledPts, usize) {
    let actions = union_alphabet(&p1.actions, &p2.actions);
    let offset = p1.n;
    let n = p1.n + p2.n;
    let matrices = actions
        .iter()
        .map(|a| {
            let mut m = Matrix::zeros(n, n);
            if let Some(m1) = p1.matrix(a) {
                for s in 0..p1.n {
                    m.row_mut(s)[..p1.n].copy_from_slice(m1.row(s));
                }
            }
            if let Some(m2) = p2.matrix(a) {
                for s in 0..p2.n {
                    m.row_mut(offset + s)[offset..].copy_from_slice(m2.row(s));
                }
            }
            m
        })
        .collect();
    let union = LabelledPts::new(n, actions, matrices).expect("shapes agree by construction");
    (union, offset)
}

/// Surjective assignment of states `0..n` to classes `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Classification {
    assign: Vec<usize>,
    m: usize,
}

impl Classification {
    pub fn new(assign: Vec<usize>, m: usize) -> Result<Self, PtsError> {
        let mut inhabited = vec![false; m];
        for (state, &class) in assign.iter().enumerate() {
            if class >= m {
                return Err(PtsError::ClassOutOfRange { state, class, m });
            }
            inhabited[class] = true;
        }
        if let Some(class) = inhabited.iter().position(|&x| !x) {
            return Err(PtsError::NonSurjective { class });
        }
        Ok(Classification { assign, m })
    }

    /// Infers `m` as one more than the largest class index.
    pub fn from_assignment(assign: Vec<usize>) -> Result<Self, PtsError> {
        let m = assign.iter().max().map_or(0, |&x| x + 1);
        Classification::new(assign, m)
    }

    pub(crate) fn from_parts_unchecked(assign: Vec<usize>, m: usize) -> Self {
        debug_assert!(Classification::new(assign.clone(), m).is_ok());
        Classification { assign, m }
    }

    /// Every state in its own class, numbered by state index.
    pub fn discrete(n: usize) -> Self {
        Classification {
            assign: (0..n).collect(),
            m: n,
        }
    }

    /// All states in class 0.
    pub fn single(n: usize) -> Self {
        Classification {
            assign: vec![0; n],
            m: usize::from(n > 0),
        }
    }

    pub fn n(&self) -> usize {
        self.assign.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assign
    }

    #[inline]
    pub fn class_of(&self, state: usize) -> usize {
        self.assign[state]
    }

    /// Members of each class, indexed by class, each sorted ascending.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.m];
        for (s, &c) in self.assign.iter().enumerate() {
            blocks[c].push(s);
        }
        blocks
    }

    /// Relabels classes in order of first occurrence (restricted growth form).
    pub fn canonical(&self) -> Classification {
        let (canon, _) = self.canonical_with_relabel();
        canon
    }

    /// Canonical form together with the map old class → new class.
    pub fn canonical_with_relabel(&self) -> (Classification, Vec<usize>) {
        let mut relabel = vec![usize::MAX; self.m];
        let mut next = 0;
        let assign = self
            .assign
            .iter()
            .map(|&c| {
                if relabel[c] == usize::MAX {
                    relabel[c] = next;
                    next += 1;
                }
                relabel[c]
            })
            .collect();
        (Classification { assign, m: self.m }, relabel)
    }

    pub fn is_canonical(&self) -> bool {
        let mut next = 0;
        for &c in &self.assign {
            if c > next {
                return false;
            }
            if c == next {
                next += 1;
            }
        }
        true
    }

    /// Applies a class permutation: class `c` becomes `perm[c]`.
    pub fn relabel(&self, perm: &[usize]) -> Classification {
        assert_eq!(perm.len(), self.m);
        Classification {
            assign: self.assign.iter().map(|&c| perm[c]).collect(),
            m: self.m,
        }
    }

    pub fn to_partition(&self) -> Partition {
        let mut blocks = self.blocks();
        blocks.sort_by_key(|b| b[0]);
        Partition {
            n: self.n(),
            blocks,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.assign.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Set partition of `0..n` in canonical form: each block sorted, blocks
/// ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalises `blocks` as a partition of `0..n`.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PtsError> {
        let mut seen = vec![false; n];
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PtsError::EmptyBlock);
            }
            for &s in block.iter() {
                if s >= n {
                    return Err(PtsError::StateOutOfRange { state: s, n });
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Err(PtsError::Overlap(s));
                }
            }
            block.sort_unstable();
        }
        if let Some(s) = seen.iter().position(|&x| !x) {
            return Err(PtsError::Uncovered(s));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { n, blocks })
    }

    pub fn discrete(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(|s| vec![s]).collect(),
        }
    }

    pub fn single(n: usize) -> Self {
        Partition {
            n,
            blocks: if n == 0 {
                vec![]
            } else {
                vec![(0..n).collect()]
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Class of each state is the index of its block.
    pub fn to_classification(&self) -> Classification {
        let mut assign = vec![0; self.n];
        for (j, block) in self.blocks.iter().enumerate() {
            for &s in block {
                assign[s] = j;
            }
        }
        Classification::from_parts_unchecked(assign, self.blocks.len())
    }

    /// True if every block of `self` lies inside some block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let coarse = other.to_classification();
        self.blocks.iter().all(|b| {
            b.iter()
                .all(|&s| coarse.class_of(s) == coarse.class_of(b[0]))
        })
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{{")?;
            for (j, s) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{s}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "]")
    }
}
