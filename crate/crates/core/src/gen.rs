//! Random instance generation and naive reference oracles.
//!
//! The generators produce small LPTSes and `⊑_R` instances with exact
//! rational weights (bounded denominators), used by the randomized tests.
//! The [`naive`] oracles decide the same questions as the main engine but
//! share none of its machinery: `⊑_R` by enumerating all subsets of the
//! support (the Hall-style criterion), simulation by a sweep-and-apply
//! downward iteration. Agreement between the two implementations on random
//! instances is the backbone of the test suite.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;

use crate::model::{ActionId, Dist, Lpts, RawLpts, RawTransition, StateId};
use crate::partition::Partition;
use crate::rational::{rat, Rat};
use crate::relation::PairSet;

/// Shape bounds for [`random_lpts`].
#[derive(Clone, Debug)]
pub struct LptsGenConfig {
    pub max_states: usize,
    pub max_actions: usize,
    pub max_transitions_per_state: usize,
    /// All weights are integer multiples of `1/d` for one `d ≤ max_denominator`
    /// per distribution.
    pub max_denominator: u64,
}

impl LptsGenConfig {
    /// The bounds used throughout the randomized tests: at most 6 states,
    /// 3 actions, 2 transitions per state, denominators up to 12.
    pub fn small() -> Self {
        LptsGenConfig {
            max_states: 6,
            max_actions: 3,
            max_transitions_per_state: 2,
            max_denominator: 12,
        }
    }
}

/// A random distribution over `0..n`: a denominator `d ≤ max_denominator`
/// split into at most `min(n, d)` positive parts at distinct cut points.
pub fn random_dist(n: usize, max_denominator: u64, rng: &mut impl Rng) -> Dist {
    assert!(n > 0 && max_denominator > 0);
    let d = rng.random_range(1..=max_denominator);
    let max_parts = n.min(d as usize);
    let k = rng.random_range(1..=max_parts);
    let mut cuts: Vec<u64> = sample(rng, d as usize - 1, k - 1).iter().map(|c| c as u64 + 1).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(d);
    let states = sample(rng, n, k);
    let entries: BTreeMap<StateId, Rat> = states
        .iter()
        .zip(cuts.windows(2))
        .map(|(s, w)| (StateId(s as u32), rat((w[1] - w[0]) as i64, d as i64)))
        .collect();
    Dist::new(entries).expect("parts are positive and sum to d/d")
}

/// A random LPTS over the explicit alphabet (actions are drawn from it).
pub fn random_lpts_with_alphabet(
    cfg: &LptsGenConfig,
    alphabet: &BTreeSet<ActionId>,
    rng: &mut impl Rng,
) -> Lpts {
    assert!(!alphabet.is_empty());
    let actions: Vec<ActionId> = alphabet.iter().copied().collect();
    let n = rng.random_range(1..=cfg.max_states);
    let mut transitions = Vec::new();
    for s in 0..n {
        for _ in 0..rng.random_range(0..=cfg.max_transitions_per_state) {
            let action = actions[rng.random_range(0..actions.len())];
            let dist = random_dist(n, cfg.max_denominator, rng);
            transitions.push(RawTransition {
                from: StateId(s as u32),
                action,
                entries: dist.iter().map(|(t, w)| (t, w.clone())).collect(),
            });
        }
    }
    RawLpts {
        name: "G".into(),
        states: (0..n).map(|i| format!("g{i}")).collect(),
        start: StateId(0),
        alphabet: alphabet.clone(),
        transitions,
    }
    .build()
    .expect("generated parts are valid")
}

/// A random LPTS over the alphabet `{0, …, max_actions−1}`.
pub fn random_lpts(cfg: &LptsGenConfig, rng: &mut impl Rng) -> Lpts {
    let alphabet: BTreeSet<ActionId> = (0..cfg.max_actions as u32).map(ActionId).collect();
    random_lpts_with_alphabet(cfg, &alphabet, rng)
}

/// A random `μ1 ⊑_R μ2` instance over the state space `0..n` with supports
/// of size at most `n` and a half-dense random relation.
pub fn random_dist_leq_instance(n: usize, rng: &mut impl Rng) -> (Dist, Dist, PairSet) {
    let mu1 = random_dist(n, 12, rng);
    let mu2 = random_dist(n, 12, rng);
    let mut r = PairSet::empty(n, n);
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if rng.random_bool(0.5) {
                r.insert(StateId(a), StateId(b));
            }
        }
    }
    (mu1, mu2, r)
}

/// A uniformly shaped random partition of `0..n`.
pub fn random_partition(n: usize, rng: &mut impl Rng) -> Partition {
    let k = rng.random_range(1..=n);
    let mut groups: BTreeMap<usize, BTreeSet<StateId>> = BTreeMap::new();
    for s in 0..n {
        groups.entry(rng.random_range(0..k)).or_default().insert(StateId(s as u32));
    }
    Partition::from_classes(n, groups.into_values().collect())
}

pub mod naive {
    //! Reference implementations sharing no code with the main engine.

    use super::*;

    /// Hall-style criterion: `μ1 ⊑_R μ2` iff `μ1(S) ≤ μ2(R(S))` for every
    /// subset `S` of `supp(μ1)`, checked by brute-force enumeration.
    pub fn naive_dist_leq(mu1: &Dist, mu2: &Dist, r: &PairSet) -> bool {
        let supp: Vec<StateId> = mu1.support().collect();
        assert!(supp.len() <= 20, "subset enumeration oracle capped at 20 support states");
        for mask in 0u32..(1 << supp.len()) {
            let subset: BTreeSet<StateId> =
                supp.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s).collect();
            if mu1.mass(&subset) > mu2.mass(&r.image(&subset)) {
                return false;
            }
        }
        true
    }

    /// Coarsest simulation by sweep-and-apply iteration: each sweep marks
    /// every currently violating pair and removes them all at once, which
    /// converges to the same greatest fixed point as one-at-a-time removal.
    pub fn naive_coarsest(l1: &Lpts, l2: &Lpts) -> PairSet {
        let mut r = PairSet::full(l1.n_states(), l2.n_states());
        loop {
            let mut doomed = Vec::new();
            for (s1, s2) in r.iter() {
                let violates = l1.transitions_from(s1).iter().any(|t1| {
                    !l2.transitions_on(s2, t1.action)
                        .iter()
                        .any(|t2| naive_dist_leq(&t1.dist, &t2.dist, &r))
                });
                if violates {
                    doomed.push((s1, s2));
                }
            }
            if doomed.is_empty() {
                return r;
            }
            for (s1, s2) in doomed {
                r.remove(s1, s2);
            }
        }
    }

    /// Decides `l1 ⪯ l2` via [`naive_coarsest`].
    pub fn naive_holds(l1: &Lpts, l2: &Lpts) -> bool {
        naive_coarsest(l1, l2).contains(l1.start(), l2.start())
    }
}
