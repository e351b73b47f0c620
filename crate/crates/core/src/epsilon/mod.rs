//! Approximate bisimilarity.
//!
//! Two systems are ε-bisimilar when the smallest distance between their
//! lumped versions, over all pairs of classification matrices with the same
//! class count, is ε:
//!
//! ```text
//! ε = min over K1, K2 of ‖K1† M1 K1 − K2† M2 K2‖
//! ```
//!
//! For labelled systems the per-action norms are aggregated (maximum by
//! default, i.e. the ∞-norm of the block-diagonal operator over all
//! actions). Actions missing from one system count as zero matrices.
//!
//! [`epsilon_bisim_exact`] enumerates every classification pair, including
//! every relabeling of the second system's classes, and returns the true
//! minimum. [`epsilon_bisim_search`] is a seeded hill climber that returns
//! an upper bound for systems too large to enumerate.

mod enumerate;
mod search;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{is_lumpable, lump_by_classification, Matrix, NormKind};
use crate::pts::{union_alphabet, Classification, LabelledPts};

pub use enumerate::{
    enumerate_classifications, exhaustive_pair_count, factorial, stirling2, Classifications,
};
pub use search::{epsilon_bisim_search, SearchOptions};

/// Default cap on the number of (k1, k2, relabeling) triples.
pub const DEFAULT_EXACT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EpsilonError {
    #[error("class counts differ: {m1} vs {m2}")]
    ClassCountMismatch { m1: usize, m2: usize },
    #[error("classification covers {classified} states, system has {states}")]
    SizeMismatch { classified: usize, states: usize },
    #[error("invalid class count {m} for {n} states")]
    InvalidRange { n: usize, m: usize },
    #[error("exhaustive search needs {count} evaluations, budget is {budget}")]
    BudgetExceeded { count: u128, budget: u64 },
    #[error("no pair of lumpable classifications has a common class count")]
    NoAdmissiblePair,
}

/// How per-action norms combine into one distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    #[default]
    Max,
    Sum,
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Max => "max",
            Aggregation::Sum => "sum",
        })
    }
}

impl std::str::FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(Aggregation::Max),
            "sum" => Ok(Aggregation::Sum),
            other => Err(format!(
                "unknown aggregation `{other}` (expected max or sum)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exhaustive,
    LocalSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonResult {
    pub epsilon: f64,
    pub k1: Classification,
    pub k2: Classification,
    pub norm: NormKind,
    pub aggregation: Aggregation,
    pub method: Method,
    /// True only for exhaustive results.
    pub optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    pub norm: NormKind,
    pub aggregation: Aggregation,
    pub budget: u64,
    /// Worker threads; the result does not depend on this.
    pub jobs: usize,
    /// When set, only classifications lumpable on their own system within
    /// this tolerance are candidates. Under this restriction ε = 0 exactly
    /// when the systems are bisimilar; without it, coarse non-lumpable
    /// classifications can average differences away.
    pub lumpable_only: Option<f64>,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            norm: NormKind::OpInf,
            aggregation: Aggregation::Max,
            budget: DEFAULT_EXACT_BUDGET,
            jobs: 1,
            lumpable_only: None,
        }
    }
}

impl ExactOptions {
    pub fn with_norm(norm: NormKind) -> Self {
        ExactOptions {
            norm,
            ..Default::default()
        }
    }
}

/// Both systems over their common alphabet.
pub(crate) fn aligned(p1: &LabelledPts, p2: &LabelledPts) -> (LabelledPts, LabelledPts) {
    let alphabet = union_alphabet(p1.actions(), p2.actions());
    (
        p1.with_actions(&alphabet).expect("superset alphabet"),
        p2.with_actions(&alphabet).expect("superset alphabet"),
    )
}

pub(crate) fn lumped_family(p: &LabelledPts, c: &Classification) -> Vec<Matrix> {
    p.matrices()
        .iter()
        .map(|m| lump_by_classification(m, c))
        .collect()
}

/// Sum of non-negative terms in ascending order, so the result depends only
/// on the multiset of terms. This makes distances exactly symmetric in the
/// two systems and invariant under simultaneous class relabeling.
fn ordered_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// Distance between `l1` and `l2` after renaming class `i` of the second
/// family to `perm[i]`.
pub(crate) fn family_distance(
    l1: &[Matrix],
    l2: &[Matrix],
    perm: &[usize],
    norm: NormKind,
    aggregation: Aggregation,
    scratch: &mut Vec<f64>,
) -> f64 {
    let m = perm.len();
    let mut per_action = Vec::with_capacity(l1.len());
    for (a, b) in l1.iter().zip(l2) {
        let value = match norm {
            NormKind::OpInf => {
                let mut best = 0.0f64;
                for i in 0..m {
                    scratch.clear();
                    let pi = perm[i];
                    scratch.extend((0..m).map(|j| (a[(pi, perm[j])] - b[(i, j)]).abs()));
                    best = best.max(ordered_sum(scratch));
                }
                best
            }
            NormKind::EntryMax => {
                let mut best = 0.0f64;
                for i in 0..m {
                    for j in 0..m {
                        best = best.max((a[(perm[i], perm[j])] - b[(i, j)]).abs());
                    }
                }
                best
            }
            NormKind::Frobenius => {
                scratch.clear();
                for i in 0..m {
                    for j in 0..m {
                        let d = a[(perm[i], perm[j])] - b[(i, j)];
                        scratch.push(d * d);
                    }
                }
                ordered_sum(scratch).sqrt()
            }
        };
        per_action.push(value);
    }
    match aggregation {
        Aggregation::Max => per_action.into_iter().fold(0.0, f64::max),
        Aggregation::Sum => ordered_sum(&mut per_action),
    }
}

/// `‖K1† M1 K1 − K2† M2 K2‖` aggregated over the union alphabet.
pub fn epsilon_distance(
    p1: &LabelledPts,
    p2: &LabelledPts,
    k1: &Classification,
    k2: &Classification,
    norm: NormKind,
    aggregation: Aggregation,
) -> Result<f64, EpsilonError> {
    if k1.m() != k2.m() {
        return Err(EpsilonError::ClassCountMismatch {
            m1: k1.m(),
            m2: k2.m(),
        });
    }
    for (k, p) in [(k1, p1), (k2, p2)] {
        if k.n() != p.n() {
            return Err(EpsilonError::SizeMismatch {
                classified: k.n(),
                states: p.n(),
            });
        }
    }
    let (a1, a2) = aligned(p1, p2);
    let identity: Vec<usize> = (0..k1.m()).collect();
    Ok(family_distance(
        &lumped_family(&a1, k1),
        &lumped_family(&a2, k2),
        &identity,
        norm,
        aggregation,
        &mut Vec::new(),
    ))
}

/// Candidate ordering: smaller ε, then fewer classes, then
/// lexicographically smaller (k1, k2).
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    pub epsilon: f64,
    pub k1: Classification,
    pub k2: Classification,
}

impl Candidate {
    pub fn cmp_key(&self, other: &Candidate) -> Ordering {
        self.epsilon
            .total_cmp(&other.epsilon)
            .then(self.k1.m().cmp(&other.k1.m()))
            .then_with(|| self.k1.assignment().cmp(other.k1.assignment()))
            .then_with(|| self.k2.assignment().cmp(other.k2.assignment()))
    }

    pub fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.cmp_key(&x) == Ordering::Less {
                y
            } else {
                x
            }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Exact ε by exhaustive enumeration of classification pairs.
pub fn epsilon_bisim_exact(
    p1: &LabelledPts,
    p2: &LabelledPts,
    opts: &ExactOptions,
) -> Result<EpsilonResult, EpsilonError> {
    let count = exhaustive_pair_count(p1.n(), p2.n());
    if count > u128::from(opts.budget) {
        return Err(EpsilonError::BudgetExceeded {
            count,
            budget: opts.budget,
        });
    }
    let (a1, a2) = aligned(p1, p2);
    let admissible = |p: &LabelledPts, c: &Classification| match opts.lumpable_only {
        Some(tol) => is_lumpable(p, c, tol),
        None => true,
    };
    let mut best: Option<Candidate> = None;
    for m in 1..=p1.n().min(p2.n()) {
        let side1: Vec<(Classification, Vec<Matrix>)> = enumerate_classifications(a1.n(), m)?
            .filter(|c| admissible(&a1, c))
            .map(|c| {
                let l = lumped_family(&a1, &c);
                (c, l)
            })
            .collect();
        let side2: Vec<(Classification, Vec<Matrix>)> = enumerate_classifications(a2.n(), m)?
            .filter(|c| admissible(&a2, c))
            .map(|c| {
                let l = lumped_family(&a2, &c);
                (c, l)
            })
            .collect();
        let perms = enumerate::permutations(m);
        if side1.is_empty() || side2.is_empty() {
            continue;
        }
        let jobs = opts.jobs.max(1).min(side1.len());
        let scan = |range: std::ops::Range<usize>| -> Option<Candidate> {
            let mut local: Option<Candidate> = None;
            let mut scratch = Vec::with_capacity(m * m);
            for (k1, l1) in &side1[range] {
                for (k2, l2) in &side2 {
                    for perm in &perms {
                        let eps = family_distance(
                            l1,
                            l2,
                            perm,
                            opts.norm,
                            opts.aggregation,
                            &mut scratch,
                        );
                        if local.as_ref().is_some_and(|b| eps > b.epsilon) {
                            continue;
                        }
                        let cand = Candidate {
                            epsilon: eps,
                            k1: k1.clone(),
                            k2: k2.relabel(perm),
                        };
                        local = Candidate::better(local, Some(cand));
                    }
                }
            }
            local
        };
        let found = if jobs <= 1 {
            scan(0..side1.len())
        } else {
            let chunk = side1.len().div_ceil(jobs);
            std::thread::scope(|s| {
                let handles: Vec<_> = (0..jobs)
                    .map(|j| {
                        let lo = (j * chunk).min(side1.len());
                        let hi = ((j + 1) * chunk).min(side1.len());
                        let scan = &scan;
                        s.spawn(move || scan(lo..hi))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .fold(None, Candidate::better)
            })
        };
        best = Candidate::better(best, found);
    }
    let best = best.ok_or(EpsilonError::NoAdmissiblePair)?;
    Ok(EpsilonResult {
        epsilon: best.epsilon,
        k1: best.k1,
        k2: best.k2,
        norm: opts.norm,
        aggregation: opts.aggregation,
        method: Method::Exhaustive,
        optimal: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bisim::are_bisimilar;

    fn pts(rows: &[&[f64]]) -> LabelledPts {
        LabelledPts::single_action(Matrix::from_rows(rows))
    }

    #[test]
    fn distance_examples() {
        let p = pts(&[&[0.5, 0.5], &[0.0, 1.0]]);
        let k = Classification::discrete(2);
        for norm in NormKind::ALL {
            assert_eq!(
                epsilon_distance(&p, &p, &k, &k, norm, Aggregation::Max).unwrap(),
                0.0
            );
        }

        let left = pts(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let right = pts(&[&[0.0, 1.0], &[0.0, 1.0]]);
        let one = Classification::single(2);
        let d = epsilon_distance(&left, &right, &one, &one, NormKind::OpInf, Aggregation::Max);
        assert_eq!(d.unwrap(), 0.0);
        // Identity classifications: difference rows are [1, -1].
        let d = epsilon_distance(&left, &right, &k, &k, NormKind::OpInf, Aggregation::Max);
        assert_eq!(d.unwrap(), 2.0);
    }

    #[test]
    fn distance_rejects_mismatched_classes() {
        let p = pts(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let err = epsilon_distance(
            &p,
            &p,
            &Classification::single(2),
            &Classification::discrete(2),
            NormKind::OpInf,
            Aggregation::Max,
        );
        assert_eq!(err, Err(EpsilonError::ClassCountMismatch { m1: 1, m2: 2 }));
        let err = epsilon_distance(
            &p,
            &p,
            &Classification::single(3),
            &Classification::single(2),
            NormKind::OpInf,
            Aggregation::Max,
        );
        assert!(matches!(err, Err(EpsilonError::SizeMismatch { .. })));
    }

    #[test]
    fn missing_actions_count_as_zero() {
        let a = pts(&[&[1.0]]);
        let b = LabelledPts::new(1, vec!["b".into()], vec![Matrix::identity(1)]).unwrap();
        let k = Classification::single(1);
        let max = epsilon_distance(&a, &b, &k, &k, NormKind::OpInf, Aggregation::Max).unwrap();
        let sum = epsilon_distance(&a, &b, &k, &k, NormKind::OpInf, Aggregation::Sum).unwrap();
        assert_eq!((max, sum), (1.0, 2.0));
    }

    #[test]
    fn self_distance_is_zero() {
        let p = pts(&[&[0.25, 0.75, 0.0], &[0.0, 0.0, 0.0], &[0.5, 0.0, 0.5]]);
        let r = epsilon_bisim_exact(&p, &p, &ExactOptions::default()).unwrap();
        assert_eq!(r.epsilon, 0.0);
        assert!(r.optimal);
        assert_eq!(r.method, Method::Exhaustive);
    }

    #[test]
    fn exact_finds_relabeled_witness() {
        // Same system with states listed in reverse order.
        let p1 = pts(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let p2 = pts(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        for norm in NormKind::ALL {
            let r = epsilon_bisim_exact(&p1, &p2, &ExactOptions::with_norm(norm)).unwrap();
            assert_eq!(r.epsilon, 0.0);
        }
        assert!(are_bisimilar(&p1, &p2, 1e-9).bisimilar);
    }

    #[test]
    fn exact_reports_recomputable_witness() {
        let p1 = pts(&[&[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        let p2 = pts(&[&[0.25, 0.75], &[0.0, 0.0]]);
        for norm in NormKind::ALL {
            let r = epsilon_bisim_exact(&p1, &p2, &ExactOptions::with_norm(norm)).unwrap();
            let again = epsilon_distance(&p1, &p2, &r.k1, &r.k2, norm, Aggregation::Max).unwrap();
            assert!((again - r.epsilon).abs() <= 1e-12);
            assert_eq!(r.k1.m(), r.k2.m());
            assert!(r.k1.is_canonical());
        }
    }

    #[test]
    fn jobs_do_not_change_result() {
        let p1 = pts(&[
            &[0.5, 0.25, 0.25, 0.0],
            &[0.0, 0.0, 0.5, 0.5],
            &[0.125, 0.875, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let p2 = pts(&[
            &[0.0, 0.5, 0.5, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 0.0],
            &[0.25, 0.25, 0.25, 0.25],
        ]);
        let one = epsilon_bisim_exact(&p1, &p2, &ExactOptions::default()).unwrap();
        for jobs in [2, 3, 8] {
            let many = epsilon_bisim_exact(
                &p1,
                &p2,
                &ExactOptions {
                    jobs,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(many, one);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p = pts(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let opts = ExactOptions {
            budget: 5,
            ..Default::default()
        };
        let err = epsilon_bisim_exact(&p, &p, &opts).unwrap_err();
        // m=1: 1, m=2: 3*3*2 = 18, m=3: 6.
        assert_eq!(
            err,
            EpsilonError::BudgetExceeded {
                count: 25,
                budget: 5
            }
        );
    }

    #[test]
    fn single_class_hides_differences_unless_lumpable_only() {
        // a-enabled states go to different places; the one-class lumps agree.
        let a1 = Matrix::from_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let b1 = Matrix::from_rows(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
        let a2 = Matrix::from_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        let b2 = Matrix::from_rows(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let acts = vec!["a".to_string(), "b".to_string()];
        let p1 = LabelledPts::new(3, acts.clone(), vec![a1, b1]).unwrap();
        let p2 = LabelledPts::new(3, acts, vec![a2, b2]).unwrap();
        assert!(!are_bisimilar(&p1, &p2, 1e-9).bisimilar);

        let any = epsilon_bisim_exact(&p1, &p2, &ExactOptions::default()).unwrap();
        assert_eq!(any.epsilon, 0.0);
        assert_eq!(any.k1.m(), 1);

        let opts = ExactOptions {
            lumpable_only: Some(1e-9),
            ..Default::default()
        };
        let strict = epsilon_bisim_exact(&p1, &p2, &opts).unwrap();
        assert!(strict.epsilon > 0.5, "{}", strict.epsilon);
        assert!(crate::linalg::is_lumpable(&p1, &strict.k1, 1e-9));
        assert!(crate::linalg::is_lumpable(&p2, &strict.k2, 1e-9));
    }

    #[test]
    fn lumpable_only_without_common_class_count() {
        // Two states with different enabledness admit only the discrete
        // classification; the single-state system admits only m = 1.
        let p1 = pts(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let p2 = pts(&[&[1.0]]);
        let opts = ExactOptions {
            lumpable_only: Some(1e-9),
            ..Default::default()
        };
        assert_eq!(
            epsilon_bisim_exact(&p1, &p2, &opts),
            Err(EpsilonError::NoAdmissiblePair)
        );
    }
}
