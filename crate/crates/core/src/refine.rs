//! Abstraction, counterexample analysis and refinement.
//!
//! [`quotient`] folds an LPTS along a partition of its states; the result
//! always simulates the original, so any specification the quotient
//! satisfies is satisfied by the original. When the quotient is too coarse
//! it may violate a specification the original meets; [`analyze_and_refine`]
//! replays a counterexample of the quotient against the original system to
//! decide which, and on a spurious counterexample it splits the partition
//! classes whose merging caused the failure.
//!
//! [`cegar`] ties the loop together: abstract with the coarsest partition,
//! check, analyze, refine, repeat. Every refinement adds at least one class,
//! so at most `|S|−1` rounds happen before the answer is exact.
//!
//! The spuriousness analysis runs the bottom-up tree simulation of the
//! counterexample `C` against the concrete system `l`, starting from the
//! candidate relation that pairs each tree state with the whole
//! concretization of the abstract state it maps to. Two events implicate the
//! abstraction, and the first one wins:
//!
//! 1. a tree state's row empties — its abstract state promised behavior no
//!    single concrete state in the class delivers; the class is split by the
//!    row as it stood before the fatal iteration, and the classes of the
//!    children by their final rows;
//! 2. the concrete start state falls out of the row of a tree state mapped
//!    to the start class while others survive — the start's class is split
//!    by the states removed alongside it.
//!
//! If neither ever happens, the start pair survives the whole run and the
//! final relation witnesses `C ⪯ l`: the counterexample is real.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use thiserror::Error;

use crate::cex::{build_cex, CexError};
use crate::model::{complete_spec, Dist, Lpts, StateId, Transition};
use crate::partition::Partition;
use crate::rational::Rat;
use crate::relation::PairSet;
use crate::simulate::{check_simulation, tree_simulation, ScanMode, SimError};
use crate::tree::StochasticTree;

#[derive(Debug, Error)]
pub enum RefineError {
    #[error("partition and systems disagree on dimensions")]
    DimensionMismatch,
    #[error("refinement made no progress; the abstraction cannot be split further")]
    NoProgress,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cex(#[from] CexError),
}

/// The quotient of `l` by a partition: one state per class (named `q0`,
/// `q1`, … in class order), distributions lifted by summing within classes.
/// `l` is always simulated by its quotient.
pub fn quotient(l: &Lpts, pi: &Partition) -> Lpts {
    assert_eq!(pi.n_states(), l.n_states(), "partition must cover the state space");
    let class_id = |s: StateId| StateId(pi.class_of(s) as u32);
    let states = (0..pi.n_classes()).map(|i| format!("q{i}")).collect();
    let transitions = l
        .transitions()
        .iter()
        .map(|t| {
            let mut entries: BTreeMap<StateId, Rat> = BTreeMap::new();
            for (s, w) in t.dist.iter() {
                *entries.entry(class_id(s)).or_insert_with(Rat::zero) += w;
            }
            Transition {
                from: class_id(t.from),
                action: t.action,
                dist: Dist::new(entries).expect("lifted masses still sum to 1"),
            }
        })
        .collect();
    Lpts::from_parts(
        format!("{}_abs", l.name()),
        states,
        class_id(l.start()),
        l.alphabet().clone(),
        transitions,
    )
}

/// One proper split performed during refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitRecord {
    /// A state identifying the class that was split.
    pub pivot: StateId,
    /// The set the class was split by.
    pub splitter: BTreeSet<StateId>,
    /// Class members inside the splitter after the cut.
    pub inside: BTreeSet<StateId>,
    /// The rest of the class.
    pub outside: BTreeSet<StateId>,
}

/// Verdict of the counterexample analysis.
#[derive(Clone, Debug)]
pub enum RefinementOutcome {
    /// The abstraction manufactured the counterexample; `refined` is the
    /// strictly finer partition.
    Spurious { refined: Partition, splits: Vec<SplitRecord> },
    /// The counterexample is genuine: `relation` witnesses `C ⪯ l` (the
    /// tree-simulation fixed point, containing the start pair).
    Real { relation: PairSet },
}

/// Splits the current class of the splitter's first element; records the cut
/// when it is proper.
fn apply_split(pi: &mut Partition, splitter: &BTreeSet<StateId>, splits: &mut Vec<SplitRecord>) {
    let Some(&pivot) = splitter.iter().next() else { return };
    let class = pi.class_members(pivot).clone();
    if pi.split_class(pivot, splitter) {
        splits.push(SplitRecord {
            pivot,
            splitter: splitter.clone(),
            inside: class.intersection(splitter).copied().collect(),
            outside: class.difference(splitter).copied().collect(),
        });
    }
}

/// Decides whether a counterexample `cex` of the abstraction `a =
/// quotient(l, pi)` is spurious, refining `pi` if so. The tree's execution
/// mapping must target `a`.
pub fn analyze_and_refine(
    cex: &StochasticTree,
    a: &Lpts,
    l: &Lpts,
    pi: &Partition,
) -> Result<RefinementOutcome, RefineError> {
    if pi.n_states() != l.n_states()
        || a.n_states() != pi.n_classes()
        || cex.exec_map().iter().any(|s| s.index() >= a.n_states())
    {
        return Err(RefineError::DimensionMismatch);
    }

    // Initial candidate: each tree state against the concretization of its
    // abstract state.
    let mut r0 = PairSet::empty(cex.lpts().n_states(), l.n_states());
    for c in cex.lpts().states() {
        for &s in &pi.classes()[cex.maps_to(c).index()] {
            r0.insert(c, s);
        }
    }

    let (r_final, log) = tree_simulation(cex.lpts(), l, &r0)?;
    let start_class = pi.class_of(l.start());
    for it in &log.iterations {
        let s1 = it.state;
        let row_before = it.r_before.row_set(s1);
        let row_after = it.r_after.row_set(s1);
        if row_before.is_empty() {
            continue;
        }
        if row_after.is_empty() {
            // Case 1: the class of s1 promised this step; no member delivers.
            // Split that class by the surviving candidates, then each child's
            // class by its final row — skipping children in the class just
            // split.
            let mut refined = pi.clone();
            let mut splits = Vec::new();
            apply_split(&mut refined, &row_before, &mut splits);
            let split_own_class = !splits.is_empty();
            let t = &cex.lpts().transitions()[it.transition];
            for child in t.dist.support() {
                if split_own_class && cex.maps_to(child) == cex.maps_to(s1) {
                    continue;
                }
                apply_split(&mut refined, &it.r_after.row_set(child), &mut splits);
            }
            if splits.is_empty() {
                return Err(RefineError::NoProgress);
            }
            return Ok(RefinementOutcome::Spurious { refined, splits });
        }
        if cex.maps_to(s1).index() == start_class && it.removed.contains(&l.start()) {
            // Case 2: the start state dies inside its class while siblings
            // survive; separate the two behaviors.
            let splitter: BTreeSet<StateId> = it.removed.iter().copied().collect();
            let mut refined = pi.clone();
            let mut splits = Vec::new();
            apply_split(&mut refined, &splitter, &mut splits);
            if splits.is_empty() {
                return Err(RefineError::NoProgress);
            }
            return Ok(RefinementOutcome::Spurious { refined, splits });
        }
    }
    debug_assert!(
        r_final.contains(cex.root(), l.start()),
        "no case fired, so the start pair must have survived"
    );
    Ok(RefinementOutcome::Real { relation: r_final })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CegarVerdict {
    Holds,
    Fails,
}

/// One refinement round, suitable for line-oriented logging.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct CegarLogRecord {
    /// Refinement round, 1-based.
    pub round: usize,
    pub classes_before: usize,
    pub classes_after: usize,
    /// `(inside, outside)` sizes of each proper split this round.
    pub splits: Vec<(usize, usize)>,
}

/// Result of a [`cegar`] run. On `Fails`, `cex` is a genuine counterexample
/// tree over the final abstraction (`cex ⪯ assumption`, `cex ⪯ l`,
/// `cex ⋠ spec`).
#[derive(Clone, Debug)]
pub struct CegarOutcome {
    pub verdict: CegarVerdict,
    pub refinements: usize,
    pub partition: Partition,
    pub assumption: Lpts,
    pub cex: Option<StochasticTree>,
    pub log: Vec<CegarLogRecord>,
}

/// Monolithic abstraction refinement: decides `l ⪯ p` by checking
/// quotient abstractions of `l` against `p`, refining on spurious
/// counterexamples. The spec is completed with self-loops for the actions of
/// `l` it does not mention.
pub fn cegar(l: &Lpts, p: &Lpts) -> Result<CegarOutcome, RefineError> {
    let target = l.alphabet().union(p.alphabet()).copied().collect();
    let p = complete_spec(p, &target).expect("target contains the spec alphabet");
    let mut pi = Partition::coarsest(l.n_states());
    let mut refinements = 0;
    let mut log = Vec::new();
    loop {
        let a = quotient(l, &pi);
        log::debug!(
            "cegar: checking {}-class abstraction of {} against {}",
            pi.n_classes(),
            l.name(),
            p.name()
        );
        let chk = check_simulation(&a, &p, ScanMode::EarlyExit);
        if chk.holds {
            return Ok(CegarOutcome {
                verdict: CegarVerdict::Holds,
                refinements,
                partition: pi,
                assumption: a,
                cex: None,
                log,
            });
        }
        let c = build_cex(&chk, chk.start, &a)?;
        match analyze_and_refine(&c, &a, l, &pi)? {
            RefinementOutcome::Spurious { refined, splits } => {
                debug_assert!(refined.n_classes() > pi.n_classes(), "strict progress");
                debug_assert!(refined.is_finer_than(&pi));
                refinements += 1;
                log.push(CegarLogRecord {
                    round: refinements,
                    classes_before: pi.n_classes(),
                    classes_after: refined.n_classes(),
                    splits: splits.iter().map(|s| (s.inside.len(), s.outside.len())).collect(),
                });
                pi = refined;
                debug_assert!(refinements <= l.n_states() - 1);
            }
            RefinementOutcome::Real { relation } => {
                debug_assert!(relation.contains(c.root(), l.start()));
                return Ok(CegarOutcome {
                    verdict: CegarVerdict::Fails,
                    refinements,
                    partition: pi,
                    assumption: a,
                    cex: Some(c),
                    log,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{naive, random_lpts, random_partition, LptsGenConfig};
    use crate::model::{classify, ActionId, RawLpts, RawTransition};
    use crate::rational::rat;
    use crate::simulate::holds;
    use crate::tree::check_exec_map;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn build(
        name: &str,
        n: usize,
        alphabet: &[u32],
        transitions: Vec<(u32, u32, Vec<(u32, Rat)>)>,
    ) -> Lpts {
        RawLpts {
            name: name.into(),
            states: (0..n).map(|i| format!("{name}{i}")).collect(),
            start: StateId(0),
            alphabet: alphabet.iter().map(|&a| ActionId(a)).collect(),
            transitions: transitions
                .into_iter()
                .map(|(from, a, entries)| RawTransition {
                    from: StateId(from),
                    action: ActionId(a),
                    entries: entries.into_iter().map(|(s, w)| (StateId(s), w)).collect(),
                })
                .collect(),
        }
        .build()
        .unwrap()
    }

    #[test]
    fn coarsest_quotient_is_one_state() {
        let l = build(
            "L",
            3,
            &[0, 1],
            vec![(0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]), (1, 1, vec![(0, rat(1, 1))])],
        );
        let a = quotient(&l, &Partition::coarsest(3));
        assert_eq!(a.n_states(), 1);
        assert_eq!(a.state_name(StateId(0)), "q0");
        // Both transitions lift to Dirac self-loops on q0.
        assert_eq!(a.transitions().len(), 2);
        assert!(a.transitions().iter().all(|t| t.dist == Dist::dirac(StateId(0))));
    }

    #[test]
    fn quotient_lifts_masses_within_classes() {
        let l = build("L", 3, &[0], vec![(0, 0, vec![(1, rat(1, 3)), (2, rat(2, 3))])]);
        let pi = Partition::from_classes(3, vec![[StateId(0)].into(), [StateId(1), StateId(2)].into()]);
        let a = quotient(&l, &pi);
        assert_eq!(a.n_states(), 2);
        let t = &a.transitions()[0];
        assert_eq!(t.dist.get(StateId(1)), rat(1, 1));
        assert!(t.dist.is_dirac());
    }

    #[test]
    fn the_original_simulates_into_its_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = LptsGenConfig::small();
        for _ in 0..30 {
            let l = random_lpts(&cfg, &mut rng);
            let pi = random_partition(l.n_states(), &mut rng);
            let a = quotient(&l, &pi);
            assert!(holds(&l, &a), "l ⪯ l/Π must always hold");
        }
    }

    #[test]
    fn singleton_quotient_is_the_original_up_to_names() {
        let l = build(
            "L",
            3,
            &[0, 1],
            vec![(0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]), (2, 1, vec![(2, rat(1, 1))])],
        );
        let a = quotient(&l, &Partition::singletons(3));
        assert_eq!(a.n_states(), 3);
        assert!(holds(&l, &a) && holds(&a, &l));
        assert_eq!(a.transitions().len(), l.transitions().len());
    }

    #[test]
    fn cegar_self_check_always_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cfg = LptsGenConfig::small();
        for _ in 0..15 {
            let l = random_lpts(&cfg, &mut rng);
            let out = cegar(&l, &l).unwrap();
            assert_eq!(out.verdict, CegarVerdict::Holds);
            assert!(out.refinements <= l.n_states().saturating_sub(1));
        }
    }

    #[test]
    fn cegar_refines_away_a_spurious_merge() {
        // s1 can keep emitting b, s2 cannot; coarsely merged they promise
        // a ⟶ (b-loop or stop), which the spec rejects; refinement must
        // separate them and conclude Holds.
        let l = build(
            "L",
            3,
            &[0, 1],
            vec![(0, 0, vec![(2, rat(1, 1))]), (1, 1, vec![(1, rat(1, 1))])],
        );
        let p = build("P", 2, &[0], vec![(0, 0, vec![(1, rat(1, 1))])]);
        assert!(naive::naive_holds(&l, &p));
        let out = cegar(&l, &p).unwrap();
        assert_eq!(out.verdict, CegarVerdict::Holds);
        assert!(out.refinements >= 1, "the single-class abstraction is too coarse");
        assert!(out.partition.n_classes() >= 2);
        assert!(out.partition.n_classes() < 3, "no need to go all the way to singletons");
    }

    #[test]
    fn cegar_failure_produces_a_genuine_tree() {
        // l emits a then b; p only allows a.
        let l = build("L", 2, &[0, 1], vec![(0, 0, vec![(1, rat(1, 1))]), (1, 1, vec![(0, rat(1, 1))])]);
        let p = build("P", 2, &[0, 1], vec![(0, 0, vec![(1, rat(1, 1))])]);
        assert!(!naive::naive_holds(&l, &p));
        let out = cegar(&l, &p).unwrap();
        assert_eq!(out.verdict, CegarVerdict::Fails);
        let cex = out.cex.expect("failing runs carry a counterexample");
        assert!(classify(cex.lpts()).tree);
        assert_eq!(check_exec_map(&cex, &out.assumption), Ok(()));
        // Genuine: embeds in l, escapes p (completed or not — the tree uses
        // only actions of l).
        assert!(holds(cex.lpts(), &l));
        assert!(!holds(cex.lpts(), &p));
    }

    #[test]
    fn cegar_agrees_with_the_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let cfg = LptsGenConfig::small();
        for _ in 0..40 {
            let l = random_lpts(&cfg, &mut rng);
            let p = random_lpts(&cfg, &mut rng);
            let target = l.alphabet().union(p.alphabet()).copied().collect();
            let completed = complete_spec(&p, &target).unwrap();
            let expect = naive::naive_holds(&l, &completed);
            let out = cegar(&l, &p).unwrap();
            assert_eq!(out.verdict == CegarVerdict::Holds, expect);
            if let Some(cex) = &out.cex {
                assert!(holds(cex.lpts(), &l));
                assert!(!holds(cex.lpts(), &completed));
            }
        }
    }

    #[test]
    fn analyze_rejects_mismatched_dimensions() {
        let l = build("L", 2, &[0], vec![(0, 0, vec![(1, rat(1, 1))])]);
        let pi = Partition::coarsest(2);
        let a = quotient(&l, &pi);
        let wrong_pi = Partition::coarsest(3);
        let chk = check_simulation(&a, &build("P", 1, &[1], vec![]), ScanMode::EarlyExit);
        let cex = build_cex(&chk, chk.start, &a).unwrap();
        assert!(matches!(
            analyze_and_refine(&cex, &a, &l, &wrong_pi),
            Err(RefineError::DimensionMismatch)
        ));
    }

    #[test]
    fn spurious_splits_are_recorded_and_proper() {
        let l = build(
            "L",
            3,
            &[0, 1],
            vec![(0, 0, vec![(2, rat(1, 1))]), (1, 1, vec![(1, rat(1, 1))])],
        );
        let p = build("P", 2, &[0], vec![(0, 0, vec![(1, rat(1, 1))])]);
        let pi = Partition::coarsest(3);
        let a = quotient(&l, &pi);
        let target = l.alphabet().union(p.alphabet()).copied().collect();
        let p = complete_spec(&p, &target).unwrap();
        let chk = check_simulation(&a, &p, ScanMode::EarlyExit);
        assert!(!chk.holds);
        let cex = build_cex(&chk, chk.start, &a).unwrap();
        match analyze_and_refine(&cex, &a, &l, &pi).unwrap() {
            RefinementOutcome::Spurious { refined, splits } => {
                assert!(!splits.is_empty());
                for s in &splits {
                    assert!(!s.inside.is_empty() && !s.outside.is_empty());
                    assert!(s.inside.contains(&s.pivot) || s.outside.contains(&s.pivot));
                }
                assert!(refined.is_finer_than(&pi));
                assert!(refined.n_classes() > pi.n_classes());
            }
            RefinementOutcome::Real { .. } => panic!("merging 3 states here is spurious"),
        }
    }
}
