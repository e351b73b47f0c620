//! Finite lattices given by an explicit order relation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice has no elements")]
    Empty,
    #[error("order is not reflexive at `{0}`")]
    NotReflexive(String),
    #[error("order is not antisymmetric: `{0}` <= `{1}` <= `{0}`")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive: `{0}` <= `{1}` <= `{2}`")]
    NotTransitive(String, String, String),
    #[error("`{0}` and `{1}` have no least upper bound")]
    MissingJoin(String, String),
    #[error("`{0}` and `{1}` have no greatest lower bound")]
    MissingMeet(String, String),
    #[error("order matrix has wrong dimensions")]
    Shape,
}

/// A finite lattice over elements `0..len`. Being finite and non-empty with
/// all binary joins and meets, it is complete.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteLattice {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
    bottom: usize,
    top: usize,
}

impl FiniteLattice {
    /// Checks that `leq` is a partial order with all binary joins and meets.
    pub fn new(names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, LatticeError> {
        let k = names.len();
        if k == 0 {
            return Err(LatticeError::Empty);
        }
        if leq.len() != k || leq.iter().any(|row| row.len() != k) {
            return Err(LatticeError::Shape);
        }
        let name = |i: usize| names[i].clone();
        for x in 0..k {
            if !leq[x][x] {
                return Err(LatticeError::NotReflexive(name(x)));
            }
        }
        for x in 0..k {
            for y in x + 1..k {
                if leq[x][y] && leq[y][x] {
                    return Err(LatticeError::NotAntisymmetric(name(x), name(y)));
                }
            }
        }
        for x in 0..k {
            for y in 0..k {
                if !leq[x][y] {
                    continue;
                }
                for z in 0..k {
                    if leq[y][z] && !leq[x][z] {
                        return Err(LatticeError::NotTransitive(name(x), name(y), name(z)));
                    }
                }
            }
        }
        let mut join = vec![vec![0; k]; k];
        let mut meet = vec![vec![0; k]; k];
        for x in 0..k {
            for y in x..k {
                let upper: Vec<usize> = (0..k).filter(|&u| leq[x][u] && leq[y][u]).collect();
                let least = upper
                    .iter()
                    .copied()
                    .find(|&u| upper.iter().all(|&v| leq[u][v]));
                let j = least.ok_or_else(|| LatticeError::MissingJoin(name(x), name(y)))?;
                let lower: Vec<usize> = (0..k).filter(|&l| leq[l][x] && leq[l][y]).collect();
                let greatest = lower
                    .iter()
                    .copied()
                    .find(|&l| lower.iter().all(|&v| leq[v][l]));
                let m = greatest.ok_or_else(|| LatticeError::MissingMeet(name(x), name(y)))?;
                join[x][y] = j;
                join[y][x] = j;
                meet[x][y] = m;
                meet[y][x] = m;
            }
        }
        let bottom = (0..k).fold(0, |acc, x| meet[acc][x]);
        let top = (0..k).fold(0, |acc, x| join[acc][x]);
        Ok(FiniteLattice {
            names,
            leq,
            join,
            meet,
            bottom,
            top,
        })
    }

    /// Builds the order as the reflexive-transitive closure of `pairs`
    /// (each `(x, y)` meaning `x <= y`).
    pub fn from_pairs(
        names: Vec<String>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, LatticeError> {
        let k = names.len();
        let mut leq = vec![vec![false; k]; k];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (x, y) in pairs {
            if x >= k || y >= k {
                return Err(LatticeError::Shape);
            }
            leq[x][y] = true;
        }
        for z in 0..k {
            for x in 0..k {
                if leq[x][z] {
                    for y in 0..k {
                        if leq[z][y] {
                            leq[x][y] = true;
                        }
                    }
                }
            }
        }
        FiniteLattice::new(names, leq)
    }

    /// The powerset of `n` points ordered by inclusion; element `i` is the
    /// subset with bitmask `i`.
    pub fn powerset(n: usize) -> Self {
        assert!(n < 16, "powerset lattice too large");
        let k = 1usize << n;
        let names = (0..k)
            .map(|mask| {
                let members: Vec<String> = (0..n)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| b.to_string())
                    .collect();
                format!("{{{}}}", members.join(","))
            })
            .collect();
        let leq = (0..k)
            .map(|x| (0..k).map(|y| x & y == x).collect())
            .collect();
        FiniteLattice::new(names, leq).expect("powerset is a lattice")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x][y]
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x][y]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Least upper bound of a set; the bottom element for the empty set.
    pub fn join_all(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.bottom, |acc, x| self.join[acc][x])
    }
}
