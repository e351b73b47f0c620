//! Finite Kripke structures and simulation relations between them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GaloisError, Subset};

/// States `0..n`, a transition relation and a distinguished state set.
/// The distinguished set is carried along for reporting only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KripkeStructure {
    n: usize,
    succ: Vec<Vec<usize>>,
    marked: BTreeSet<usize>,
}

impl KripkeStructure {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        marked: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GaloisError> {
        let mut succ = vec![Vec::new(); n];
        for (s, t) in edges {
            for x in [s, t] {
                if x >= n {
                    return Err(GaloisError::StateOutOfRange { state: x, n });
                }
            }
            succ[s].push(t);
        }
        for list in &mut succ {
            list.sort_unstable();
            list.dedup();
        }
        let marked: BTreeSet<usize> = marked.into_iter().collect();
        if let Some(&x) = marked.iter().find(|&&x| x >= n) {
            return Err(GaloisError::StateOutOfRange { state: x, n });
        }
        Ok(KripkeStructure { n, succ, marked })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        self.succ[s].binary_search(&t).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |&t| (s, t)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn marked(&self) -> &BTreeSet<usize> {
        &self.marked
    }

    /// Strongest post-condition: all one-step successors of states in `s`.
    pub fn post(&self, s: Subset) -> Subset {
        let mut out = 0;
        for (state, ts) in self.succ.iter().enumerate() {
            if s & (1 << state) != 0 {
                for &t in ts {
                    out |= 1 << t;
                }
            }
        }
        out
    }
}

/// Binary relation between concrete and abstract states.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Relation {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn full(concrete: usize, abs: usize) -> Self {
        Relation::new((0..concrete).flat_map(|c| (0..abs).map(move |a| (c, a))))
    }

    pub fn identity(n: usize) -> Self {
        Relation::new((0..n).map(|s| (s, s)))
    }

    pub fn contains(&self, c: usize, a: usize) -> bool {
        self.pairs.contains(&(c, a))
    }

    pub fn insert(&mut self, c: usize, a: usize) -> bool {
        self.pairs.insert((c, a))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation {
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    fn check_range(&self, c: &KripkeStructure, a: &KripkeStructure) -> Result<(), GaloisError> {
        match self.iter().find(|&(x, y)| x >= c.n() || y >= a.n()) {
            Some((x, y)) => Err(GaloisError::RelationOutOfRange { pair: (x, y) }),
            None => Ok(()),
        }
    }
}

impl FromIterator<(usize, usize)> for Relation {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        Relation::new(iter)
    }
}

/// `concrete R abs` and `concrete → successor`, but no abstract step from
/// `abs` reaches a state related to `successor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimCounterexample {
    pub concrete: usize,
    pub abs: usize,
    pub successor: usize,
}

impl fmt::Display for SimCounterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) related, {} -> {} has no matching abstract step",
            self.concrete, self.abs, self.concrete, self.successor
        )
    }
}

fn pair_violation(
    c: &KripkeStructure,
    a: &KripkeStructure,
    r: &Relation,
    x: usize,
    y: usize,
) -> Option<usize> {
    c.successors(x)
        .iter()
        .copied()
        .find(|&x2| !a.successors(y).iter().any(|&y2| r.contains(x2, y2)))
}

/// Lexicographically smallest violation of the simulation condition, if any.
pub fn check_simulation(
    c: &KripkeStructure,
    a: &KripkeStructure,
    r: &Relation,
) -> Result<Option<SimCounterexample>, GaloisError> {
    r.check_range(c, a)?;
    Ok(r.iter().find_map(|(x, y)| {
        pair_violation(c, a, r, x, y).map(|successor| SimCounterexample {
            concrete: x,
            abs: y,
            successor,
        })
    }))
}

/// Whether `r` is a simulation of `c` by `a`. Ill-formed relations are not.
pub fn is_simulation(c: &KripkeStructure, a: &KripkeStructure, r: &Relation) -> bool {
    matches!(check_simulation(c, a, r), Ok(None))
}

/// Greatest simulation of `c` by `a`: start from the full relation and
/// remove violating pairs until stable.
pub fn largest_simulation(c: &KripkeStructure, a: &KripkeStructure) -> Relation {
    let mut r = Relation::full(c.n(), a.n());
    loop {
        let bad: Vec<(usize, usize)> = r
            .iter()
            .filter(|&(x, y)| pair_violation(c, a, &r, x, y).is_some())
            .collect();
        if bad.is_empty() {
            return r;
        }
        for p in bad {
            r.pairs.remove(&p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks(n: usize, edges: &[(usize, usize)]) -> KripkeStructure {
        KripkeStructure::new(n, edges.iter().copied(), []).unwrap()
    }

    /// Union of every relation accepted by `is_simulation`.
    fn brute_force_largest(c: &KripkeStructure, a: &KripkeStructure) -> Relation {
        let cells: Vec<(usize, usize)> = Relation::full(c.n(), a.n()).iter().collect();
        let mut acc = Relation::default();
        for mask in 0u32..1 << cells.len() {
            let r: Relation = cells
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            if is_simulation(c, a, &r) {
                acc = acc.union(&r);
            }
        }
        acc
    }

    #[test]
    fn identity_and_empty_are_simulations() {
        let c = ks(3, &[(0, 1), (1, 2), (2, 0), (0, 2)]);
        assert!(is_simulation(&c, &c, &Relation::identity(3)));
        assert!(is_simulation(&c, &c, &Relation::default()));
    }

    #[test]
    fn unmatched_step_is_reported() {
        let c = ks(2, &[(0, 1)]);
        let a = ks(1, &[]);
        let r = Relation::new([(0, 0)]);
        let cex = check_simulation(&c, &a, &r).unwrap().unwrap();
        assert_eq!(
            cex,
            SimCounterexample {
                concrete: 0,
                abs: 0,
                successor: 1
            }
        );
    }

    #[test]
    fn out_of_range_relation() {
        let c = ks(1, &[]);
        let r = Relation::new([(0, 3)]);
        assert!(matches!(
            check_simulation(&c, &c, &r),
            Err(GaloisError::RelationOutOfRange { pair: (0, 3) })
        ));
        assert!(!is_simulation(&c, &c, &r));
    }

    #[test]
    fn largest_simulation_examples() {
        let one = ks(1, &[]);
        assert_eq!(largest_simulation(&one, &one), Relation::full(1, 1));

        let still = ks(3, &[]);
        let a = ks(2, &[(0, 1)]);
        assert_eq!(largest_simulation(&still, &a), Relation::full(3, 2));

        let c = ks(2, &[(0, 1)]);
        let a = ks(2, &[(0, 1), (1, 1)]);
        let largest = largest_simulation(&c, &a);
        assert_eq!(largest, brute_force_largest(&c, &a));
        // 1 is terminal, so it is simulated by anything; 0 needs a step.
        assert_eq!(largest, Relation::new([(0, 0), (0, 1), (1, 0), (1, 1)]));
    }

    #[test]
    fn largest_matches_brute_force_on_small_pairs() {
        let shapes = [
            ks(1, &[]),
            ks(1, &[(0, 0)]),
            ks(2, &[(0, 1)]),
            ks(2, &[(0, 1), (1, 0)]),
            ks(3, &[(0, 1), (1, 2)]),
            ks(3, &[(0, 0), (1, 2), (2, 1)]),
        ];
        for c in &shapes {
            for a in &shapes {
                if c.n() * a.n() > 9 {
                    continue;
                }
                let largest = largest_simulation(c, a);
                assert!(is_simulation(c, a, &largest));
                assert_eq!(largest, brute_force_largest(c, a));
            }
        }
    }

    #[test]
    fn post_collects_successors() {
        let c = ks(3, &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(c.post(0b001), 0b110);
        assert_eq!(c.post(0b010), 0b100);
        assert_eq!(c.post(0b100), 0);
        assert_eq!(c.post(0), 0);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(KripkeStructure::new(2, [(0, 2)], []).is_err());
        assert!(KripkeStructure::new(2, [], [5]).is_err());
    }
}
