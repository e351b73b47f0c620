//! Exact probabilistic bisimulation.
//!
//! The coarsest bisimulation of a system is its coarsest lumpable
//! partition: states in a block agree, for every action, on whether the
//! action is enabled and on the total probability of moving into each
//! block. It is computed by naive signature refinement starting from the
//! one-block partition.
//!
//! Signatures are compared with an absolute tolerance. Tolerance grouping is
//! not transitive, so systems whose probabilities differ by amounts close to
//! the tolerance may be split differently depending on state order. Systems
//! with exactly representable probabilities are unaffected.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{block_masses, lump_by_classification, lumpability_violation, LumpViolation};
use crate::pts::{
    disjoint_union, row_enabled, union_alphabet, Classification, LabelledPts, Partition,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BisimError {
    #[error("classification is not lumpable: {0}")]
    NotLumpable(LumpViolation),
    #[error("classification covers {classified} states, system has {states}")]
    SizeMismatch { classified: usize, states: usize },
}

/// One refinement round: split every block of `c` by signature.
/// Returns `None` once `c` is stable.
fn refine_once(p: &LabelledPts, c: &Classification, tol: f64) -> Option<Classification> {
    let mut assign = vec![0usize; p.n()];
    let mut next = 0;
    for members in c.blocks() {
        let mut groups: Vec<(Vec<f64>, usize)> = Vec::new();
        for &s in &members {
            let sig = signature(p, c, s);
            let class = match groups
                .iter()
                .find(|(rep, _)| rep.iter().zip(&sig).all(|(a, b)| (a - b).abs() <= tol))
            {
                Some(&(_, class)) => class,
                None => {
                    groups.push((sig, next));
                    next += 1;
                    next - 1
                }
            };
            assign[s] = class;
        }
    }
    if next == c.m() {
        return None;
    }
    Some(Classification::from_parts_unchecked(assign, next).canonical())
}

/// Per action: enabledness flag followed by the mass into every block.
fn signature(p: &LabelledPts, c: &Classification, s: usize) -> Vec<f64> {
    let mut sig = Vec::with_capacity(p.actions().len() * (c.m() + 1));
    for m in p.matrices() {
        sig.push(if row_enabled(m, s) { 1.0 } else { 0.0 });
        sig.extend(block_masses(m.row(s), c));
    }
    sig
}

/// The coarsest lumpable partition of `p`.
pub fn coarsest_bisimulation(p: &LabelledPts, tol: f64) -> Partition {
    let mut c = Classification::single(p.n());
    while let Some(finer) = refine_once(p, &c, tol) {
        c = finer;
    }
    c.to_partition()
}

/// The abstract system `K† M K` for every action of `p`.
pub fn quotient(p: &LabelledPts, c: &Classification, tol: f64) -> Result<LabelledPts, BisimError> {
    if c.n() != p.n() {
        return Err(BisimError::SizeMismatch {
            classified: c.n(),
            states: p.n(),
        });
    }
    if let Some(v) = lumpability_violation(p, c, tol) {
        return Err(BisimError::NotLumpable(v));
    }
    let matrices = p
        .matrices()
        .iter()
        .map(|m| lump_by_classification(m, c))
        .collect();
    Ok(LabelledPts::new(c.m(), p.actions().to_vec(), matrices).expect("square by construction"))
}

/// Coarsest bisimulation of `p` and the corresponding minimal system.
pub fn minimise(p: &LabelledPts, tol: f64) -> (Partition, LabelledPts) {
    let partition = coarsest_bisimulation(p, tol);
    let q = quotient(p, &partition.to_classification(), tol)
        .expect("coarsest bisimulation is lumpable");
    (partition, q)
}

/// Classification pair with equal lumped systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisimWitness {
    pub m: usize,
    pub k1: Classification,
    pub k2: Classification,
    /// Shared abstract system over the union alphabet.
    pub quotient: LabelledPts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisimOutcome {
    pub bisimilar: bool,
    /// Coarsest bisimulation of the disjoint union; states of the second
    /// system are shifted by `offset`.
    pub union_partition: Partition,
    pub offset: usize,
    pub witness: Option<BisimWitness>,
}

/// Decides bisimilarity of two systems: they are bisimilar iff every class
/// of the coarsest bisimulation of their disjoint union contains states of
/// both. On success the union classes, restricted to each side, are the
/// witness classifications, and both lump to the same system.
pub fn are_bisimilar(p1: &LabelledPts, p2: &LabelledPts, tol: f64) -> BisimOutcome {
    let (union, offset) = disjoint_union(p1, p2);
    let union_partition = coarsest_bisimulation(&union, tol);
    let two_sided = union_partition
        .blocks()
        .iter()
        .all(|b| b[0] < offset && *b.last().unwrap() >= offset);
    let witness = two_sided.then(|| {
        let classes = union_partition.to_classification();
        let m = classes.m();
        let k1 = Classification::new(classes.assignment()[..offset].to_vec(), m)
            .expect("every class meets the first system");
        let k2 = Classification::new(classes.assignment()[offset..].to_vec(), m)
            .expect("every class meets the second system");
        let alphabet = union_alphabet(p1.actions(), p2.actions());
        let q1 = quotient(&p1.with_actions(&alphabet).unwrap(), &k1, tol)
            .expect("restriction of a lumpable partition is lumpable");
        debug_assert!({
            let q2 = quotient(&p2.with_actions(&alphabet).unwrap(), &k2, tol).unwrap();
            q1.matrices()
                .iter()
                .zip(q2.matrices())
                .all(|(a, b)| a.approx_eq(b, 2.0 * tol))
        });
        BisimWitness {
            m,
            k1,
            k2,
            quotient: q1,
        }
    });
    BisimOutcome {
        bisimilar: two_sided,
        union_partition,
        offset,
        witness,
    }
}
