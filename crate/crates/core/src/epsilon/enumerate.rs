//! Enumeration of classifications as restricted growth strings.

use crate::pts::Classification;

use super::EpsilonError;

/// Yields every surjective classification of `n` states onto exactly `m`
/// classes once, in canonical (restricted growth) form and lexicographic
/// order. The number of items is the Stirling number `S(n, m)`.
#[derive(Debug, Clone)]
pub struct Classifications {
    n: usize,
    m: usize,
    current: Option<Vec<usize>>,
}

/// Fails with [`EpsilonError::InvalidRange`] unless `1 <= m <= n`.
pub fn enumerate_classifications(n: usize, m: usize) -> Result<Classifications, EpsilonError> {
    if m == 0 || m > n {
        return Err(EpsilonError::InvalidRange { n, m });
    }
    let mut first = vec![0; n];
    fill_smallest(&mut first, 0, 0, m);
    Ok(Classifications {
        n,
        m,
        current: Some(first),
    })
}

/// Fills `a[from..]` with the lexicographically smallest completion that
/// still uses every label below `m`, given that labels `0..=max` already
/// occur in the prefix. Returns false if no completion exists.
fn fill_smallest(a: &mut [usize], from: usize, max: usize, m: usize) -> bool {
    let remaining = a.len() - from;
    let missing = m - 1 - max;
    if missing > remaining {
        return false;
    }
    let zeros = remaining - missing;
    for (k, x) in a[from..].iter_mut().enumerate() {
        *x = if k < zeros { 0 } else { max + 1 + (k - zeros) };
    }
    true
}

impl Iterator for Classifications {
    type Item = Classification;

    fn next(&mut self) -> Option<Classification> {
        let current = self.current.take()?;
        let item = Classification::from_parts_unchecked(current.clone(), self.m);

        let mut a = current;
        let mut prefix_max = Vec::with_capacity(self.n);
        let mut mx = 0;
        for &x in &a {
            mx = mx.max(x);
            prefix_max.push(mx);
        }
        // Position 0 is always label 0; advance the rightmost position that
        // admits a larger label with a feasible completion.
        'outer: for i in (1..self.n).rev() {
            let bound = (prefix_max[i - 1] + 1).min(self.m - 1);
            for v in a[i] + 1..=bound {
                a[i] = v;
                if fill_smallest(&mut a, i + 1, prefix_max[i - 1].max(v), self.m) {
                    self.current = Some(a);
                    break 'outer;
                }
            }
        }
        Some(item)
    }
}

/// Stirling numbers of the second kind, saturating at `u128::MAX`.
pub fn stirling2(n: usize, m: usize) -> u128 {
    if m > n {
        return 0;
    }
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for i in 1..=n {
        for k in (1..=m.min(i)).rev() {
            row[k] = (k as u128)
                .saturating_mul(row[k])
                .saturating_add(row[k - 1]);
        }
        row[0] = 0;
    }
    row[m]
}

pub fn factorial(m: usize) -> u128 {
    (1..=m as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// Number of (k1, k2, relabeling) triples the exhaustive search visits.
pub fn exhaustive_pair_count(n1: usize, n2: usize) -> u128 {
    (1..=n1.min(n2)).fold(0u128, |acc, m| {
        acc.saturating_add(
            stirling2(n1, m)
                .saturating_mul(stirling2(n2, m))
                .saturating_mul(factorial(m)),
        )
    })
}

/// All permutations of `0..m` in lexicographic order.
pub(crate) fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..m).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..m).rev().find(|&i| p[i - 1] < p[i]) else {
            break;
        };
        let j = (i..m).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    /// Brute force: all m^n assignments, keep surjective ones, canonicalise.
    fn brute_force(n: usize, m: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        let total = m.pow(n as u32);
        for code in 0..total {
            let mut x = code;
            let assign: Vec<usize> = (0..n)
                .map(|_| {
                    let d = x % m;
                    x /= m;
                    d
                })
                .collect();
            if let Ok(c) = Classification::new(assign, m) {
                out.insert(c.canonical().assignment().to_vec());
            }
        }
        out
    }

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_classifications(3, 1).unwrap().count(), 1);
        assert_eq!(enumerate_classifications(3, 3).unwrap().count(), 1);
        assert_eq!(enumerate_classifications(4, 2).unwrap().count(), 7);
        assert_eq!(brute_force(4, 2).len(), 7);
    }

    #[test]
    fn matches_brute_force_in_order() {
        for n in 1..=6 {
            for m in 1..=n {
                let got: Vec<Vec<usize>> = enumerate_classifications(n, m)
                    .unwrap()
                    .map(|c| c.assignment().to_vec())
                    .collect();
                let expected: Vec<Vec<usize>> = brute_force(n, m).into_iter().collect();
                assert_eq!(got, expected, "n={n} m={m}");
                assert_eq!(got.len() as u128, stirling2(n, m));
            }
        }
    }

    #[test]
    fn invalid_range() {
        assert!(matches!(
            enumerate_classifications(3, 0),
            Err(EpsilonError::InvalidRange { n: 3, m: 0 })
        ));
        assert!(enumerate_classifications(2, 3).is_err());
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling2(6, 3), 90);
        assert_eq!(stirling2(10, 5), 42525);
        assert_eq!(stirling2(0, 0), 1);
        assert_eq!(stirling2(3, 0), 0);
        // m=1: 1, m=2: 31^2*2, m=3: 90^2*6, m=4: 65^2*24, m=5: 15^2*120, m=6: 720.
        assert_eq!(
            exhaustive_pair_count(6, 6),
            1 + 1922 + 48600 + 101400 + 27000 + 720
        );
    }

    #[test]
    fn permutations_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
