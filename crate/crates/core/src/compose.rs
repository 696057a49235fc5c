//! Parallel composition and projection.
//!
//! [`compose`] builds `L1 ‖ L2`: states are reachable pairs, shared actions
//! synchronize (with product distributions), and actions private to one
//! alphabet interleave while the other side stays put. Every composed
//! transition remembers which of the three cases produced it and the
//! component distributions involved ([`Provenance`]); projection relies on
//! this to split a counterexample over the composition back into a
//! counterexample over one component.
//!
//! [`project`] maps a stochastic tree over a composition onto one side.
//! When the chosen side moves, the tree's children are grouped by the
//! component state they land in and each group becomes one projected child,
//! weighted by the component distribution. When the chosen side stands
//! still (the action is private to the other side), the step disappears:
//! the children are absorbed into the current projected node.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{ActionId, Dist, Lpts, StateId, Transition};
use crate::rational::Rat;
use crate::tree::{dist_is_copy_of, StochasticTree, TreeBuilder};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("tree transition from {0} matches no transition of the composition")]
    UnmatchedTransition(String),
}

/// Which component of a composition to keep when projecting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Which composition rule produced a transition: both components moved on a
/// shared action, or only one moved on a private action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProvenanceCase {
    Sync,
    LeftOnly,
    RightOnly,
}

/// The component distributions behind one composed transition. The
/// stationary side of an interleaving step carries its Dirac self-loop, so
/// the composed distribution is always the product `left ⊗ right`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub case: ProvenanceCase,
    pub left: Dist,
    pub right: Dist,
}

impl Provenance {
    pub fn side(&self, side: Side) -> &Dist {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// True iff the chosen side participates in the move.
    pub fn moves(&self, side: Side) -> bool {
        match (self.case, side) {
            (ProvenanceCase::Sync, _) => true,
            (ProvenanceCase::LeftOnly, Side::Left) => true,
            (ProvenanceCase::RightOnly, Side::Right) => true,
            _ => false,
        }
    }
}

/// The product measure `μ1 ⊗ μ2` on pairs.
pub fn product_dist(mu1: &Dist, mu2: &Dist) -> BTreeMap<(StateId, StateId), Rat> {
    let mut out = BTreeMap::new();
    for (a, w1) in mu1.iter() {
        for (b, w2) in mu2.iter() {
            out.insert((a, b), w1 * w2);
        }
    }
    out
}

/// `L1 ‖ L2` restricted to its reachable states, with per-transition
/// provenance and the pair decoding kept alongside the plain LPTS.
#[derive(Clone, Debug)]
pub struct ComposedLpts {
    lpts: Lpts,
    pairs: Vec<(StateId, StateId)>,
    pair_ids: BTreeMap<(StateId, StateId), StateId>,
    provenance: Vec<Provenance>,
    left_alphabet: BTreeSet<ActionId>,
    right_alphabet: BTreeSet<ActionId>,
}

impl ComposedLpts {
    pub fn lpts(&self) -> &Lpts {
        &self.lpts
    }

    /// Decodes composed state `s` into its component pair.
    pub fn decode(&self, s: StateId) -> (StateId, StateId) {
        self.pairs[s.index()]
    }

    pub fn side_of(&self, s: StateId, side: Side) -> StateId {
        let (l, r) = self.decode(s);
        match side {
            Side::Left => l,
            Side::Right => r,
        }
    }

    /// The composed state for a component pair, if reachable.
    pub fn pair_id(&self, left: StateId, right: StateId) -> Option<StateId> {
        self.pair_ids.get(&(left, right)).copied()
    }

    pub fn pairs(&self) -> &[(StateId, StateId)] {
        &self.pairs
    }

    /// Provenance, parallel to `self.lpts().transitions()`.
    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn side_alphabet(&self, side: Side) -> &BTreeSet<ActionId> {
        match side {
            Side::Left => &self.left_alphabet,
            Side::Right => &self.right_alphabet,
        }
    }
}

/// Composes two LPTSes (Sync on shared actions, interleaving on private
/// ones), keeping only the part reachable from the start pair. Reachable
/// pairs are numbered in row-major `(left, right)` order, so the layout is
/// independent of the traversal.
pub fn compose(l1: &Lpts, l2: &Lpts) -> ComposedLpts {
    let shared: BTreeSet<ActionId> = l1.alphabet().intersection(l2.alphabet()).copied().collect();

    // Component moves available at a pair, as (action, left dist, right dist,
    // case); the stationary side contributes a Dirac self-loop.
    let moves_at = |s1: StateId, s2: StateId| {
        let mut moves: Vec<(ActionId, Dist, Dist, ProvenanceCase)> = Vec::new();
        for t1 in l1.transitions_from(s1) {
            if shared.contains(&t1.action) {
                for t2 in l2.transitions_on(s2, t1.action) {
                    moves.push((t1.action, t1.dist.clone(), t2.dist.clone(), ProvenanceCase::Sync));
                }
            } else {
                moves.push((t1.action, t1.dist.clone(), Dist::dirac(s2), ProvenanceCase::LeftOnly));
            }
        }
        for t2 in l2.transitions_from(s2) {
            if !shared.contains(&t2.action) {
                moves.push((t2.action, Dist::dirac(s1), t2.dist.clone(), ProvenanceCase::RightOnly));
            }
        }
        moves
    };

    let start = (l1.start(), l2.start());
    let mut reachable: BTreeSet<(StateId, StateId)> = [start].into();
    let mut queue = VecDeque::from([start]);
    while let Some((s1, s2)) = queue.pop_front() {
        for (_, d1, d2, _) in moves_at(s1, s2) {
            for (pair, _) in product_dist(&d1, &d2) {
                if reachable.insert(pair) {
                    queue.push_back(pair);
                }
            }
        }
    }

    let pairs: Vec<(StateId, StateId)> = reachable.into_iter().collect();
    let pair_ids: BTreeMap<(StateId, StateId), StateId> =
        pairs.iter().enumerate().map(|(i, &p)| (p, StateId(i as u32))).collect();

    let mut tagged: Vec<(Transition, Provenance)> = Vec::new();
    for (&(s1, s2), &from) in &pair_ids {
        for (action, left, right, case) in moves_at(s1, s2) {
            let entries: BTreeMap<StateId, Rat> = product_dist(&left, &right)
                .into_iter()
                .map(|(pair, w)| (pair_ids[&pair], w))
                .collect();
            let dist = Dist::new(entries).expect("product of distributions is a distribution");
            tagged.push((Transition { from, action, dist }, Provenance { case, left, right }));
        }
    }
    // Canonical order; identical composed transitions arising from distinct
    // component moves keep the first provenance.
    tagged.sort_by(|(a, _), (b, _)| a.cmp(b));
    tagged.dedup_by(|(a, _), (b, _)| a == b);
    let (transitions, provenance): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();

    let names = pairs
        .iter()
        .map(|&(a, b)| format!("({},{})", l1.state_name(a), l2.state_name(b)))
        .collect();
    let alphabet: BTreeSet<ActionId> = l1.alphabet().union(l2.alphabet()).copied().collect();
    let lpts = Lpts::from_parts(
        format!("{}||{}", l1.name(), l2.name()),
        names,
        pair_ids[&start],
        alphabet,
        transitions,
    );
    debug_assert_eq!(lpts.transitions().len(), provenance.len());
    ComposedLpts {
        lpts,
        pairs,
        pair_ids,
        provenance,
        left_alphabet: l1.alphabet().clone(),
        right_alphabet: l2.alphabet().clone(),
    }
}

/// The same LPTS with a larger alphabet. Widening changes composition
/// behavior (the new actions now require this system's participation) but
/// not the transitions themselves.
pub fn widen_alphabet(l: &Lpts, extra: &BTreeSet<ActionId>) -> Lpts {
    let alphabet: BTreeSet<ActionId> = l.alphabet().union(extra).copied().collect();
    Lpts::from_parts(
        l.name().to_string(),
        l.state_names().to_vec(),
        l.start(),
        alphabet,
        l.transitions().to_vec(),
    )
}

/// The global index and provenance of the first composed transition that
/// the tree transition `(from, action, dist)` is a copy of.
fn matched_provenance<'a>(
    tree: &StochasticTree,
    composed: &'a ComposedLpts,
    from: StateId,
    action: ActionId,
    dist: &Dist,
) -> Option<&'a Provenance> {
    let mapped = tree.maps_to(from);
    composed
        .lpts
        .transitions()
        .iter()
        .position(|t| t.from == mapped && t.action == action && dist_is_copy_of(tree, dist, &t.dist))
        .map(|i| &composed.provenance[i])
}

/// Projects a stochastic tree over `composed` onto one component. The
/// result is a stochastic tree over that component (its execution mapping
/// targets component states, its alphabet is the component alphabet);
/// stationary steps are contracted away.
pub fn project(
    tree: &StochasticTree,
    composed: &ComposedLpts,
    side: Side,
) -> Result<StochasticTree, ComposeError> {
    let mut b = TreeBuilder::new();
    let root = b.root(composed.side_of(tree.maps_to(tree.root()), side));
    let mut stack = vec![(tree.root(), root)];
    // Contraction can hand several tree nodes to one projected node; their
    // projected transitions accumulate there.
    while let Some((c, p)) = stack.pop() {
        for t in tree.lpts().transitions_from(c) {
            let prov = matched_provenance(tree, composed, c, t.action, &t.dist).ok_or_else(
                || ComposeError::UnmatchedTransition(tree.lpts().state_name(c).to_string()),
            )?;
            if prov.moves(side) {
                let nu = prov.side(side);
                let mut parts: BTreeMap<StateId, Vec<StateId>> = BTreeMap::new();
                for (child, _) in t.dist.iter() {
                    let part = composed.side_of(tree.maps_to(child), side);
                    parts.entry(part).or_default().push(child);
                }
                debug_assert!(parts.keys().copied().eq(nu.support()));
                let mut entries = Vec::new();
                let mut nodes = BTreeMap::new();
                for &part in parts.keys() {
                    let q = b.child(p, part);
                    entries.push((q, nu.get(part)));
                    nodes.insert(part, q);
                }
                b.add_transition(p, t.action, entries);
                for (part, kids) in parts {
                    for child in kids {
                        stack.push((child, nodes[&part]));
                    }
                }
            } else {
                // The chosen side stands still: absorb the children.
                for (child, _) in t.dist.iter() {
                    debug_assert_eq!(
                        composed.side_of(tree.maps_to(child), side),
                        composed.side_of(tree.maps_to(c), side),
                    );
                    stack.push((child, p));
                }
            }
        }
    }
    let name = match side {
        Side::Left => format!("{}.L", tree.lpts().name()),
        Side::Right => format!("{}.R", tree.lpts().name()),
    };
    Ok(b.finish(name, composed.side_alphabet(side).clone()))
}
