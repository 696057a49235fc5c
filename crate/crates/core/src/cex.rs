//! Counterexample construction.
//!
//! When `l1 ⪯ l2` fails, the removal trace of the simulation check contains
//! everything needed to justify the verdict. [`build_cex`] replays it into a
//! stochastic tree `C` with `C ⪯ l1` (witnessed by its execution mapping)
//! and `C ⋠ l2`.
//!
//! A tree node stands for a left state `s1` and a set of right states it must
//! refute. The targets are grouped by the offending transition `s1 —a→ μ1` of
//! their removal records, and each group shares one fresh copy of `μ1` below
//! the node: if a target had no `a`-transitions the copy alone is the
//! refutation; otherwise every challenge `μ` contributes its witness set
//! `S ⊆ supp(μ1)` (with `μ1(S) > μ(R(S))`) and the target states
//! `supp(μ) ∖ R(S)` it failed to cover, and each such `(s, t)` — a pair
//! removed strictly earlier, so the recursion terminates — is refuted below
//! the child copying `s`. Sharing one copy per offending transition keeps the
//! tree reactive whenever the left system is.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{ActionId, Dist, Lpts, StateId};
use crate::simulate::SimCheck;
use crate::tree::{StochasticTree, TreeBuilder};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CexError {
    #[error("pair ({0:?}, {1:?}) is in the simulation relation; no counterexample exists")]
    PairNotRemoved(StateId, StateId),
}

/// Builds the stochastic-tree counterexample for a removed pair (usually
/// `chk.start`). `l1` is the left system the tree executes in.
pub fn build_cex(
    chk: &SimCheck,
    pair: (StateId, StateId),
    l1: &Lpts,
) -> Result<StochasticTree, CexError> {
    if chk.record_for(pair).is_none() {
        return Err(CexError::PairNotRemoved(pair.0, pair.1));
    }
    let mut b = TreeBuilder::new();
    let root = b.root(pair.0);
    graft(&mut b, root, pair.0, &BTreeSet::from([pair.1]), chk);
    Ok(b.finish("cex", l1.alphabet().clone()))
}

/// Adds, below `node` (which already maps to `s1`), the refutations of every
/// pair `(s1, t)` for `t ∈ targets`.
fn graft(
    b: &mut TreeBuilder,
    node: StateId,
    s1: StateId,
    targets: &BTreeSet<StateId>,
    chk: &SimCheck,
) {
    // One copied transition refutes every target whose removal record blames
    // the same move of s1.
    let mut groups: BTreeMap<(ActionId, &Dist), Vec<StateId>> = BTreeMap::new();
    for &t in targets {
        let rec = chk.record_for((s1, t)).expect("grafted pairs are removed pairs");
        groups.entry((rec.action, &rec.mu1)).or_default().push(t);
    }

    for ((action, mu1), group) in groups {
        // Copy the offending distribution onto fresh children.
        let mut child_of = BTreeMap::new();
        let mut entries = Vec::new();
        for (s, w) in mu1.iter() {
            let c = b.child(node, s);
            child_of.insert(s, c);
            entries.push((c, w.clone()));
        }
        b.add_transition(node, action, entries);

        // Collect the grafts demanded by the group's challenges: s must also
        // beat every target state its witness set failed to cover.
        let mut grafts: BTreeMap<StateId, BTreeSet<StateId>> = BTreeMap::new();
        for &t in &group {
            let rec = chk.record_for((s1, t)).expect("grouped pairs are removed pairs");
            let r_snap = chk.relation_at(rec.snapshot);
            for ch in &rec.challenges {
                let image = r_snap.image(&ch.witness);
                for u in ch.mu2.support().filter(|u| !image.contains(u)) {
                    for &s in &ch.witness {
                        debug_assert!(
                            chk.record_for((s, u)).expect("uncovered pairs were removed").snapshot
                                < rec.snapshot,
                            "grafted pairs are removed strictly earlier"
                        );
                        grafts.entry(s).or_default().insert(u);
                    }
                }
            }
        }
        for (s, us) in grafts {
            graft(b, child_of[&s], s, &us, chk);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, ActionId, Dist, RawLpts, RawTransition};
    use crate::rational::{rat, Rat};
    use crate::simulate::{coarsest_simulation, holds};
    use crate::tree::check_exec_map;

    fn build(
        name: &str,
        states: &[&str],
        alphabet: &[u32],
        transitions: Vec<(u32, u32, Vec<(u32, Rat)>)>,
    ) -> Lpts {
        RawLpts {
            name: name.into(),
            states: states.iter().map(|s| s.to_string()).collect(),
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

    /// `C ⪯ l1` via the execution mapping and also via the decision
    /// procedure, and `C ⋠ l2`.
    fn assert_valid_cex(cex: &StochasticTree, l1: &Lpts, l2: &Lpts) {
        assert_eq!(check_exec_map(cex, l1), Ok(()));
        assert!(classify(cex.lpts()).tree);
        assert!(holds(cex.lpts(), l1), "a counterexample embeds into the left system");
        assert!(!holds(cex.lpts(), l2), "a counterexample escapes the right system");
    }

    #[test]
    fn missing_action_gives_a_one_step_tree() {
        let l1 = build("L", &["s0", "s1"], &[0], vec![(0, 0, vec![(1, rat(1, 1))])]);
        let l2 = build("R", &["t0"], &[0], vec![]);
        let chk = coarsest_simulation(&l1, &l2);
        let cex = build_cex(&chk, chk.start, &l1).unwrap();
        assert_valid_cex(&cex, &l1, &l2);
        assert_eq!(cex.lpts().n_states(), 2);
        assert_eq!(cex.lpts().transitions().len(), 1);
        assert_eq!(cex.maps_to(StateId(1)), StateId(1));
    }

    #[test]
    fn unremoved_pair_is_an_error() {
        let l = build("L", &["s0"], &[0], vec![]);
        let chk = coarsest_simulation(&l, &l);
        assert_eq!(
            build_cex(&chk, chk.start, &l).unwrap_err(),
            CexError::PairNotRemoved(StateId(0), StateId(0)),
        );
    }

    #[test]
    fn probability_mismatch_grafts_a_continuation() {
        // Left: send reaches a delivering state with probability 1/2; right
        // only offers 1/3 on its delivering branch.
        let l1 = build(
            "L",
            &["a0", "a1", "a2", "a3"],
            &[0, 1],
            vec![(0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]), (1, 1, vec![(3, rat(1, 1))])],
        );
        let l2 = build(
            "R",
            &["b0", "b1", "b2", "b3"],
            &[0, 1],
            vec![(0, 0, vec![(1, rat(2, 3)), (2, rat(1, 3))]), (2, 1, vec![(3, rat(1, 1))])],
        );
        assert!(!holds(&l1, &l2));
        let chk = coarsest_simulation(&l1, &l2);
        let cex = build_cex(&chk, chk.start, &l1).unwrap();
        assert_valid_cex(&cex, &l1, &l2);

        // root —send→ {1/2 (a1), 1/2 (a2)}, and the a1-child must carry the
        // deliver step that b1 cannot answer.
        let c = cex.lpts();
        assert_eq!(c.n_states(), 4);
        let first = &c.transitions_from(cex.root())[0];
        assert_eq!(first.action, ActionId(0));
        let a1_child = first
            .dist
            .support()
            .find(|&ch| cex.maps_to(ch) == StateId(1))
            .expect("child copying a1");
        let cont = c.transitions_from(a1_child);
        assert_eq!(cont.len(), 1);
        assert_eq!(cont[0].action, ActionId(1));
        assert_eq!(first.dist.get(a1_child), rat(1, 2));
    }

    #[test]
    fn counterexamples_need_not_be_fully_probabilistic() {
        // The left state r11 offers y and z; no single right state offers
        // both with the needed mass, so the counterexample keeps both
        // transitions on one node.
        let r1 = build(
            "R1",
            &["r10", "r11", "r12", "r13"],
            &[0, 1, 2],
            vec![
                (0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]),
                (1, 1, vec![(3, rat(1, 1))]),
                (1, 2, vec![(3, rat(1, 1))]),
            ],
        );
        let r2 = build(
            "R2",
            &["r20", "r21", "r22", "r23"],
            &[0, 1, 2],
            vec![
                (0, 0, vec![(1, rat(1, 3)), (2, rat(1, 3)), (3, rat(1, 3))]),
                (1, 1, vec![(1, rat(1, 1))]),
                (2, 1, vec![(2, rat(1, 1))]),
                (2, 2, vec![(2, rat(1, 1))]),
                (3, 2, vec![(3, rat(1, 1))]),
            ],
        );
        assert!(!holds(&r1, &r2));
        let chk = coarsest_simulation(&r1, &r2);
        let cex = build_cex(&chk, chk.start, &r1).unwrap();
        assert_valid_cex(&cex, &r1, &r2);
        let kind = classify(cex.lpts());
        assert!(!kind.fully_probabilistic, "one node carries both y and z");
        assert!(kind.reactive, "still at most one transition per action here");
        // The node copying r11 carries the two extra obligations.
        let busy = cex
            .lpts()
            .states()
            .find(|&s| cex.lpts().transitions_from(s).len() == 2)
            .expect("a node with two transitions");
        assert_eq!(cex.maps_to(busy), StateId(1));
    }

    #[test]
    fn counterexamples_need_not_be_reactive() {
        // Two internally different y-moves of l1 are each beaten by a
        // different right branch, so the counterexample must keep both
        // y-transitions on the same node.
        let l = build(
            "L",
            &["l0", "l1", "l2", "lz", "lw", "ld"],
            &[0, 1, 2, 3],
            vec![
                (0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]),
                (1, 1, vec![(3, rat(1, 3)), (4, rat(2, 3))]),
                (1, 1, vec![(3, rat(2, 3)), (4, rat(1, 3))]),
                (3, 2, vec![(5, rat(1, 1))]),
                (4, 3, vec![(5, rat(1, 1))]),
            ],
        );
        let r = build(
            "R",
            &["r0", "r1", "r2", "r3", "rz", "rw", "rzw", "rd"],
            &[0, 1, 2, 3],
            vec![
                (0, 0, vec![(1, rat(1, 3)), (2, rat(1, 3)), (3, rat(1, 3))]),
                (1, 1, vec![(4, rat(1, 3)), (5, rat(2, 3))]),
                (2, 1, vec![(6, rat(1, 1))]),
                (3, 1, vec![(4, rat(2, 3)), (5, rat(1, 3))]),
                (4, 2, vec![(7, rat(1, 1))]),
                (5, 3, vec![(7, rat(1, 1))]),
                (6, 2, vec![(7, rat(1, 1))]),
                (6, 3, vec![(7, rat(1, 1))]),
            ],
        );
        assert!(!holds(&l, &r));
        let chk = coarsest_simulation(&l, &r);
        let cex = build_cex(&chk, chk.start, &l).unwrap();
        assert_valid_cex(&cex, &l, &r);
        let kind = classify(cex.lpts());
        assert!(!kind.reactive, "one node carries two distinct y-moves");
        let busy = cex
            .lpts()
            .states()
            .find(|&s| cex.lpts().transitions_on(s, ActionId(1)).len() == 2)
            .expect("a node with two y-transitions");
        assert_eq!(cex.maps_to(busy), StateId(1));
    }

    #[test]
    fn every_removed_pair_yields_a_valid_cex() {
        // Not just the start pair: each entry of the trace can seed a tree.
        let l1 = build(
            "L",
            &["s0", "s1", "s2"],
            &[0, 1],
            vec![(0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]), (1, 1, vec![(2, rat(1, 1))])],
        );
        let l2 = build(
            "R",
            &["t0", "t1"],
            &[0, 1],
            vec![(0, 0, vec![(1, rat(1, 1))])],
        );
        let chk = coarsest_simulation(&l1, &l2);
        assert!(!chk.trace.is_empty());
        let rebase = |l: &Lpts, start: StateId| {
            Lpts::new(
                format!("{}'", l.name()),
                l.state_names().to_vec(),
                start,
                l.alphabet().clone(),
                l.transitions().to_vec(),
            )
            .unwrap()
        };
        for rec in &chk.trace {
            let cex = build_cex(&chk, rec.pair, &l1).unwrap();
            // The tree roots at the pair's left state and refutes simulation
            // from its right state: validate against re-rooted copies.
            assert_eq!(check_exec_map(&cex, &rebase(&l1, rec.pair.0)), Ok(()));
            assert!(!holds(cex.lpts(), &rebase(&l2, rec.pair.1)));
        }
    }

    #[test]
    fn random_failures_build_checkable_trees() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let cfg = crate::gen::LptsGenConfig::small();
        let mut built = 0;
        for _ in 0..60 {
            let l1 = crate::gen::random_lpts(&cfg, &mut rng);
            let l2 = crate::gen::random_lpts(&cfg, &mut rng);
            let chk = coarsest_simulation(&l1, &l2);
            if chk.holds {
                continue;
            }
            built += 1;
            let cex = build_cex(&chk, chk.start, &l1).unwrap();
            assert_valid_cex(&cex, &l1, &l2);
        }
        assert!(built > 0, "some random pair must fail");
    }

    #[test]
    fn dirac_weight_one_is_copied_exactly() {
        let l1 = build("L", &["s0", "s1"], &[0], vec![(0, 0, vec![(1, rat(1, 1))])]);
        let l2 = build("R", &["t0", "t1"], &[1], vec![]);
        // Alphabets play no role in simulation itself; widen anyway so the
        // two systems describe the same action space.
        let l2 = crate::compose::widen_alphabet(&l2, &[ActionId(0)].into());
        let chk = coarsest_simulation(&l1, &l2);
        let cex = build_cex(&chk, chk.start, &l1).unwrap();
        let t = &cex.lpts().transitions()[0];
        assert!(t.dist.is_dirac());
        assert_eq!(t.dist, Dist::dirac(StateId(1)));
    }
}
