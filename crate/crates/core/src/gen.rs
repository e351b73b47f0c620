//! Seeded generators for test corpora.
//!
//! Probabilities are multiples of 2⁻¹⁰, so generated row sums are exact and
//! tolerance-based refinement never hinges on rounding.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::pts::{row_enabled, Classification, LabelledPts, PtsError};

/// Denominator of every generated weight.
pub const DYADIC_UNITS: u32 = 1 << 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("need at least one state")]
    NoStates,
    #[error("density must lie in (0, 1], got {0}")]
    Density(f64),
    #[error("perturbation bound must be a finite non-negative number, got {0}")]
    Delta(f64),
    #[error("expected {expected} multiplicities, got {got}")]
    Multiplicities { expected: usize, got: usize },
    #[error("multiplicities must be at least 1")]
    ZeroMultiplicity,
    #[error(transparent)]
    Pts(#[from] PtsError),
}

/// Splits `DYADIC_UNITS` into `k` positive integer parts, uniformly over
/// compositions. Requires `1 <= k <= DYADIC_UNITS`.
fn composition(rng: &mut impl Rng, k: usize) -> Vec<u32> {
    let total = DYADIC_UNITS as usize;
    let mut cuts: Vec<usize> = index::sample(rng, total - 1, k - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for c in cuts.into_iter().chain([total]) {
        parts.push((c - prev) as u32);
        prev = c;
    }
    parts
}

/// A random dyadic distribution over `len` slots with a random non-empty
/// support.
fn dyadic_row(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let max_support = len.min(DYADIC_UNITS as usize);
    let k = rng.gen_range(1..=max_support);
    let support = index::sample(rng, len, k);
    let parts = composition(rng, k);
    let mut row = vec![0.0; len];
    for (slot, w) in support.into_iter().zip(parts) {
        row[slot] = f64::from(w) / f64::from(DYADIC_UNITS);
    }
    row
}

/// A random system: each (state, action) row is enabled with probability
/// `density` and is then a dyadic distribution.
pub fn gen_random_pts(
    n: usize,
    actions: &[String],
    density: f64,
    seed: u64,
) -> Result<LabelledPts, GenError> {
    if n == 0 {
        return Err(GenError::NoStates);
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenError::Density(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices = Vec::with_capacity(actions.len());
    for _ in actions {
        let mut m = Matrix::zeros(n, n);
        for s in 0..n {
            if rng.gen_bool(density) {
                m.row_mut(s).copy_from_slice(&dyadic_row(&mut rng, n));
            }
        }
        matrices.push(m);
    }
    Ok(LabelledPts::new(n, actions.to_vec(), matrices)?)
}

/// Lifts `quotient` to a larger system in which quotient state `j` becomes
/// `multiplicities[j]` consecutive states. Each lifted row sends exactly the
/// quotient's mass into each block, split among the block's members with
/// random dyadic weights. Returns the lift and the planted classification.
pub fn gen_planted(
    quotient: &LabelledPts,
    multiplicities: &[usize],
    seed: u64,
) -> Result<(LabelledPts, Classification), GenError> {
    let m = quotient.n();
    if multiplicities.len() != m {
        return Err(GenError::Multiplicities {
            expected: m,
            got: multiplicities.len(),
        });
    }
    if multiplicities.contains(&0) {
        return Err(GenError::ZeroMultiplicity);
    }
    let assign: Vec<usize> = multiplicities
        .iter()
        .enumerate()
        .flat_map(|(j, &k)| std::iter::repeat_n(j, k))
        .collect();
    let n = assign.len();
    let mut starts = vec![0; m];
    for j in 1..m {
        starts[j] = starts[j - 1] + multiplicities[j - 1];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices = Vec::with_capacity(quotient.actions().len());
    for q in quotient.matrices() {
        let mut lift = Matrix::zeros(n, n);
        for (s, &j) in assign.iter().enumerate() {
            for b in 0..m {
                let mass = q[(j, b)];
                if mass == 0.0 {
                    continue;
                }
                let size = multiplicities[b];
                // With a single member the block gets the mass unsplit.
                let weights = if size == 1 {
                    vec![1.0]
                } else {
                    dyadic_row(&mut rng, size)
                };
                for (i, w) in weights.into_iter().enumerate() {
                    lift[(s, starts[b] + i)] = mass * w;
                }
            }
        }
        matrices.push(lift);
    }
    let system = LabelledPts::new(n, quotient.actions().to_vec(), matrices)?;
    let classification = Classification::new(assign, m)?;
    Ok((system, classification))
}

/// Moves at most `delta` mass inside every enabled row: a random positive
/// entry donates `min(delta, entry)` to another random entry of the row.
pub fn perturb(p: &LabelledPts, delta: f64, seed: u64) -> Result<LabelledPts, GenError> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(GenError::Delta(delta));
    }
    let n = p.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrices = p.matrices().to_vec();
    for m in &mut matrices {
        for s in 0..n {
            if delta == 0.0 || n < 2 || !row_enabled(m, s) {
                continue;
            }
            let row = m.row_mut(s);
            let donors: Vec<usize> = (0..n).filter(|&t| row[t] > 0.0).collect();
            let donor = donors[rng.gen_range(0..donors.len())];
            let mut receiver = rng.gen_range(0..n - 1);
            if receiver >= donor {
                receiver += 1;
            }
            let amount = delta.min(row[donor]);
            row[donor] -= amount;
            row[receiver] += amount;
        }
    }
    Ok(LabelledPts::new(n, p.actions().to_vec(), matrices)?)
}
