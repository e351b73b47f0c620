//! Seeded hill climbing over classification pairs.
//!
//! The state is a pair of classifications with equal class count. Each step
//! proposes one move and keeps it unless it increases the distance:
//!
//! - move one state of either system to another class,
//! - merge two classes in both systems,
//! - split one class in both systems,
//! - swap two class labels of the second system.
//!
//! A restart ends after a run of proposals without strict improvement; the
//! next restart draws a fresh random pair. Restart `r` uses its own RNG
//! seeded from the master seed and `r`, so results depend only on the seed
//! and the iteration budget.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::NormKind;
use crate::pts::{Classification, LabelledPts};

use super::{
    aligned, family_distance, lumped_family, Aggregation, Candidate, EpsilonResult, Method,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub norm: NormKind,
    pub aggregation: Aggregation,
    /// Total number of evaluated proposals across all restarts.
    pub budget: u64,
    pub seed: u64,
    /// Proposals without improvement before restarting.
    pub patience: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            norm: NormKind::OpInf,
            aggregation: Aggregation::Max,
            budget: 10_000,
            seed: 0,
            patience: 200,
        }
    }
}

/// Splitmix64 finaliser; decorrelates per-restart seeds.
fn restart_seed(master: u64, restart: u64) -> u64 {
    let mut z = master ^ restart.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Pair of raw assignments sharing class count `m`. Every class is
/// inhabited on both sides.
#[derive(Debug, Clone)]
struct Pair {
    a1: Vec<usize>,
    a2: Vec<usize>,
    m: usize,
}

fn random_assignment(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Vec<usize> {
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let mut assign = vec![0; n];
    for (k, &s) in states.iter().enumerate() {
        assign[s] = if k < m { k } else { rng.gen_range(0..m) };
    }
    assign
}

fn class_size(assign: &[usize], class: usize) -> usize {
    assign.iter().filter(|&&c| c == class).count()
}

fn reassign(rng: &mut ChaCha8Rng, assign: &mut [usize], m: usize) -> bool {
    if m < 2 {
        return false;
    }
    let movable: Vec<usize> = (0..assign.len())
        .filter(|&s| class_size(assign, assign[s]) > 1)
        .collect();
    let Some(&s) = movable.choose(rng) else {
        return false;
    };
    let mut target = rng.gen_range(0..m - 1);
    if target >= assign[s] {
        target += 1;
    }
    assign[s] = target;
    true
}

fn merge(rng: &mut ChaCha8Rng, pair: &mut Pair) -> bool {
    if pair.m < 2 {
        return false;
    }
    let i = rng.gen_range(0..pair.m);
    let mut j = rng.gen_range(0..pair.m - 1);
    if j >= i {
        j += 1;
    }
    let (keep, gone) = (i.min(j), i.max(j));
    for assign in [&mut pair.a1, &mut pair.a2] {
        for c in assign.iter_mut() {
            if *c == gone {
                *c = keep;
            } else if *c > gone {
                *c -= 1;
            }
        }
    }
    pair.m -= 1;
    true
}

/// Moves a random non-empty proper subset of `class` into `new_class`.
fn split_class(rng: &mut ChaCha8Rng, assign: &mut [usize], class: usize, new_class: usize) {
    let members: Vec<usize> = (0..assign.len()).filter(|&s| assign[s] == class).collect();
    let k = rng.gen_range(1..members.len());
    for &s in members.choose_multiple(rng, k) {
        assign[s] = new_class;
    }
}

fn split(rng: &mut ChaCha8Rng, pair: &mut Pair) -> bool {
    let splittable: Vec<usize> = (0..pair.m)
        .filter(|&c| class_size(&pair.a1, c) > 1 && class_size(&pair.a2, c) > 1)
        .collect();
    let Some(&class) = splittable.choose(rng) else {
        return false;
    };
    split_class(rng, &mut pair.a1, class, pair.m);
    split_class(rng, &mut pair.a2, class, pair.m);
    pair.m += 1;
    true
}

fn swap_labels(rng: &mut ChaCha8Rng, pair: &mut Pair) -> bool {
    if pair.m < 2 {
        return false;
    }
    let i = rng.gen_range(0..pair.m);
    let mut j = rng.gen_range(0..pair.m - 1);
    if j >= i {
        j += 1;
    }
    for c in pair.a2.iter_mut() {
        if *c == i {
            *c = j;
        } else if *c == j {
            *c = i;
        }
    }
    true
}

fn propose(rng: &mut ChaCha8Rng, pair: &Pair) -> Option<Pair> {
    let mut next = pair.clone();
    let ok = match rng.gen_range(0..5) {
        0 => reassign(rng, &mut next.a1, next.m),
        1 => reassign(rng, &mut next.a2, next.m),
        2 => merge(rng, &mut next),
        3 => split(rng, &mut next),
        _ => swap_labels(rng, &mut next),
    };
    ok.then_some(next)
}

struct Evaluator<'a> {
    p1: &'a LabelledPts,
    p2: &'a LabelledPts,
    norm: NormKind,
    aggregation: Aggregation,
    scratch: Vec<f64>,
}

impl Evaluator<'_> {
    fn eval(&mut self, pair: &Pair) -> Candidate {
        let k1 = Classification::from_parts_unchecked(pair.a1.clone(), pair.m);
        let k2 = Classification::from_parts_unchecked(pair.a2.clone(), pair.m);
        let identity: Vec<usize> = (0..pair.m).collect();
        let epsilon = family_distance(
            &lumped_family(self.p1, &k1),
            &lumped_family(self.p2, &k2),
            &identity,
            self.norm,
            self.aggregation,
            &mut self.scratch,
        );
        // Report the pair with the first system's classes in canonical order;
        // relabeling both sides alike leaves the distance unchanged.
        let (k1, relabel) = k1.canonical_with_relabel();
        let k2 = k2.relabel(&relabel);
        Candidate { epsilon, k1, k2 }
    }
}

/// Upper bound on ε by randomised local search. Deterministic for a fixed
/// seed and budget.
pub fn epsilon_bisim_search(
    p1: &LabelledPts,
    p2: &LabelledPts,
    opts: &SearchOptions,
) -> EpsilonResult {
    let (a1, a2) = aligned(p1, p2);
    let mut ev = Evaluator {
        p1: &a1,
        p2: &a2,
        norm: opts.norm,
        aggregation: opts.aggregation,
        scratch: Vec::new(),
    };
    let max_m = a1.n().min(a2.n());
    let trivial = Pair {
        a1: vec![0; a1.n()],
        a2: vec![0; a2.n()],
        m: 1,
    };
    let mut best = ev.eval(&trivial);
    let mut used = 1u64;
    let mut restart = 0u64;
    while used < opts.budget {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(opts.seed, restart));
        restart += 1;
        let m = rng.gen_range(1..=max_m);
        let mut current = Pair {
            a1: random_assignment(&mut rng, a1.n(), m),
            a2: random_assignment(&mut rng, a2.n(), m),
            m,
        };
        let mut current_eval = ev.eval(&current);
        used += 1;
        best = Candidate::better(Some(best), Some(current_eval.clone())).unwrap();
        let mut stale = 0u64;
        while used < opts.budget && stale < opts.patience {
            let Some(next) = propose(&mut rng, &current) else {
                stale += 1;
                continue;
            };
            let next_eval = ev.eval(&next);
            used += 1;
            if next_eval.epsilon < current_eval.epsilon {
                stale = 0;
            } else {
                stale += 1;
            }
            if next_eval.epsilon <= current_eval.epsilon {
                best = Candidate::better(Some(best), Some(next_eval.clone())).unwrap();
                current = next;
                current_eval = next_eval;
            }
        }
    }
    EpsilonResult {
        epsilon: best.epsilon,
        k1: best.k1,
        k2: best.k2,
        norm: opts.norm,
        aggregation: opts.aggregation,
        method: Method::LocalSearch,
        optimal: false,
    }
}
