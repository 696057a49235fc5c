//! Strong-simulation checking.
//!
//! The key primitive is [`dist_leq`]: given distributions `μ1`, `μ2` and a
//! candidate relation `R`, decide whether `μ1 ⊑_R μ2`, i.e. whether a weight
//! function `w` exists with row sums `μ1`, column sums `μ2` and support
//! inside `R`. This is decided exactly by a maximum-flow computation on the
//! bipartite network `source → supp(μ1) → supp(μ2) → sink` with middle edges
//! of capacity 1 on `R`-pairs: the weight function exists iff the maximum
//! flow value is exactly 1.
//!
//! On top of `dist_leq`, [`check_simulation`] computes the coarsest strong
//! simulation between two LPTSes by the standard downward fixed point:
//! starting from `S1 × S2`, pairs violating the simulation condition are
//! removed until stabilization. Every removal is recorded in a trace rich
//! enough to reconstruct counterexamples later (see [`crate::cex`]).
//!
//! [`tree_simulation`] is the specialized bottom-up variant used when the
//! left system is a stochastic tree: each non-leaf tree transition is
//! processed exactly once, children before parents, and the per-iteration
//! relation snapshots are logged for counterexample analysis.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::model::{classify, Dist, Lpts, StateId};
use crate::rational::Rat;
use crate::relation::PairSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("state spaces do not match the relation dimensions")]
    DimensionMismatch,
    #[error("no deficient state: the flow routes all of μ1")]
    NoDeficientState,
    #[error("witness iteration stalled; the flow assignment is not maximal")]
    WitnessStalled,
    #[error("the left system is not a stochastic tree")]
    NotATree,
}

/// A weight function (or partial flow) on pairs of states; absent pairs
/// carry weight zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightFn {
    entries: std::collections::BTreeMap<(StateId, StateId), Rat>,
}

impl WeightFn {
    pub fn get(&self, s1: StateId, s2: StateId) -> Rat {
        self.entries.get(&(s1, s2)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((StateId, StateId), &Rat)> + '_ {
        self.entries.iter().map(|(&p, w)| (p, w))
    }

    /// Row sum `Σ_t w(s, t)`.
    pub fn row_sum(&self, s1: StateId) -> Rat {
        self.entries
            .range((s1, StateId(0))..=(s1, StateId(u32::MAX)))
            .fold(Rat::zero(), |acc, (_, w)| acc + w)
    }

    /// Checks the weight-function conditions for `μ1 ⊑_R μ2`: rows sum to
    /// `μ1(s1)`, columns to `μ2(s2)`, and positive weight only on `R`-pairs.
    pub fn verify(&self, mu1: &Dist, mu2: &Dist, r: &PairSet) -> bool {
        use num_traits::Signed;
        for (&(s1, s2), w) in &self.entries {
            if w.is_negative() {
                return false;
            }
            if w.is_positive() && !r.contains(s1, s2) {
                return false;
            }
        }
        for s1 in mu1.support() {
            if self.row_sum(s1) != mu1.get(s1) {
                return false;
            }
        }
        let mut col_sums = std::collections::BTreeMap::new();
        for (&(_, s2), w) in &self.entries {
            *col_sums.entry(s2).or_insert_with(Rat::zero) += w;
        }
        mu2.support().all(|s2| col_sums.get(&s2).cloned().unwrap_or_else(Rat::zero) == mu2.get(s2))
            && col_sums.keys().all(|s2| mu2.contains(*s2))
    }
}

/// Result of a `μ1 ⊑_R μ2` query. `Fails` carries the maximal flow found,
/// which [`witness_subset`] turns into a violating subset of `supp(μ1)`.
#[derive(Clone, Debug)]
pub enum DistLeq {
    Holds(WeightFn),
    Fails(WeightFn),
}

impl DistLeq {
    pub fn holds(&self) -> bool {
        matches!(self, DistLeq::Holds(_))
    }
}

/// Decides `μ1 ⊑_R μ2` by exact maximum flow.
pub fn dist_leq(mu1: &Dist, mu2: &Dist, r: &PairSet) -> DistLeq {
    let supp1: Vec<StateId> = mu1.support().collect();
    let supp2: Vec<StateId> = mu2.support().collect();
    let (k1, k2) = (supp1.len(), supp2.len());
    let (source, sink) = (0, k1 + k2 + 1);
    let mut net = FlowNetwork::new(k1 + k2 + 2);
    for (i, &s1) in supp1.iter().enumerate() {
        net.add_edge(source, 1 + i, mu1.get(s1));
    }
    let mut middles = Vec::new();
    for (i, &s1) in supp1.iter().enumerate() {
        for (j, &s2) in supp2.iter().enumerate() {
            if r.contains(s1, s2) {
                let e = net.add_edge(1 + i, 1 + k1 + j, Rat::one());
                middles.push((e, s1, s2));
            }
        }
    }
    for (j, &s2) in supp2.iter().enumerate() {
        net.add_edge(1 + k1 + j, sink, mu2.get(s2));
    }
    let value = net.max_flow(source, sink);
    let mut w = WeightFn::default();
    for (e, s1, s2) in middles {
        let f = net.flow(e);
        if !f.is_zero() {
            w.entries.insert((s1, s2), f.clone());
        }
    }
    if value.is_one() {
        debug_assert!(w.verify(mu1, mu2, r));
        DistLeq::Holds(w)
    } else {
        DistLeq::Fails(w)
    }
}

/// Extracts, from a failed `μ1 ⊑_R μ` query, a subset `T ⊆ supp(μ1)` with
/// `μ1(T) > μ(R(T))` — the Hall-style witness of the failure.
///
/// Seeded with the first (in id order) deficient state of `supp(μ1)`, the
/// iteration closes `T` under "sends flow into `R(T)`" until the strict
/// inequality appears. The closure keeps previously added states: dropping
/// them can make the iteration stall on instances where the seed itself
/// carries no flow, while with a maximal flow the growing variant provably
/// terminates with a valid witness.
pub fn witness_subset(
    mu1: &Dist,
    mu: &Dist,
    r: &PairSet,
    flow: &WeightFn,
) -> Result<BTreeSet<StateId>, SimError> {
    let supp1: Vec<StateId> = mu1.support().collect();
    let seed = supp1
        .iter()
        .copied()
        .find(|&s1| flow.row_sum(s1) < mu1.get(s1))
        .ok_or(SimError::NoDeficientState)?;
    let mut t: BTreeSet<StateId> = [seed].into();
    for _ in 0..=supp1.len() {
        let image = r.image(&t);
        if mu1.mass(&t) > mu.mass(&image) {
            return Ok(t);
        }
        let mut grown = t.clone();
        for &s1 in &supp1 {
            if !grown.contains(&s1)
                && image.iter().any(|&s2| mu.contains(s2) && flow.get(s1, s2).is_positive())
            {
                grown.insert(s1);
            }
        }
        t = grown;
    }
    Err(SimError::WitnessStalled)
}

/// One distribution `μ ∈ Δ` that the offending transition was checked
/// against, together with the witness subset `S^μ1` extracted from the
/// failed flow.
#[derive(Clone, Debug)]
pub struct Challenge {
    pub mu2: Dist,
    pub witness: BTreeSet<StateId>,
}

/// A removed pair, with everything needed to rebuild the failure: the first
/// offending transition `s1 —a→ μ1`, one challenge per `μ ∈ Δ` (the
/// a-transitions of `s2`, in canonical order; empty when `s2` has none), and
/// the index of this removal in the trace. The relation in effect at removal
/// time is `SimCheck::relation_at(snapshot)`.
#[derive(Clone, Debug)]
pub struct RemovalRecord {
    pub pair: (StateId, StateId),
    pub action: crate::model::ActionId,
    pub mu1: Dist,
    pub challenges: Vec<Challenge>,
    pub snapshot: usize,
}

/// Whether the fixed point runs to completion or stops as soon as the start
/// pair is removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    EarlyExit,
}

/// Outcome of a simulation check between two LPTSes.
#[derive(Clone, Debug)]
pub struct SimCheck {
    n1: usize,
    n2: usize,
    pub start: (StateId, StateId),
    /// The relation when the run stopped (the coarsest simulation if the run
    /// was exhaustive).
    pub relation: PairSet,
    pub trace: Vec<RemovalRecord>,
    /// True iff the start pair survived.
    pub holds: bool,
}

impl SimCheck {
    /// Reconstructs the relation in effect before removal `snapshot`:
    /// `S1 × S2` minus the first `snapshot` removals.
    pub fn relation_at(&self, snapshot: usize) -> PairSet {
        let mut r = PairSet::full(self.n1, self.n2);
        for rec in &self.trace[..snapshot] {
            r.remove(rec.pair.0, rec.pair.1);
        }
        r
    }

    /// The removal record for `pair`, if it was removed.
    pub fn record_for(&self, pair: (StateId, StateId)) -> Option<&RemovalRecord> {
        self.trace.iter().find(|rec| rec.pair == pair)
    }
}

/// Finds the first (in canonical order) transition of `s1` that no
/// `a`-transition of `s2` can match under `r`; returns its removal record.
fn find_violation(
    l1: &Lpts,
    l2: &Lpts,
    s1: StateId,
    s2: StateId,
    r: &PairSet,
) -> Option<(Dist, crate::model::ActionId, Vec<Challenge>)> {
    for t1 in l1.transitions_from(s1) {
        let delta = l2.transitions_on(s2, t1.action);
        let results: Vec<DistLeq> = delta.iter().map(|t2| dist_leq(&t1.dist, &t2.dist, r)).collect();
        if results.iter().any(|res| res.holds()) {
            continue;
        }
        let challenges = delta
            .iter()
            .zip(&results)
            .map(|(t2, res)| {
                let flow = match res {
                    DistLeq::Fails(f) => f,
                    DistLeq::Holds(_) => unreachable!("no challenge holds here"),
                };
                let witness = witness_subset(&t1.dist, &t2.dist, r, flow)
                    .expect("failed dist_leq always yields a witness");
                Challenge { mu2: t2.dist.clone(), witness }
            })
            .collect();
        return Some((t1.dist.clone(), t1.action, challenges));
    }
    None
}

/// Computes the coarsest strong simulation `R ⊆ S1 × S2` between `l1` and
/// `l2` by downward iteration from the full relation, recording a removal
/// trace. Pairs are examined in lexicographic order and the scan restarts
/// after every removal, so the trace is fully deterministic.
pub fn check_simulation(l1: &Lpts, l2: &Lpts, mode: ScanMode) -> SimCheck {
    let (n1, n2) = (l1.n_states(), l2.n_states());
    let start = (l1.start(), l2.start());
    let mut r = PairSet::full(n1, n2);
    let mut trace = Vec::new();

    // A pair only needs re-examination when a removal touched the supports
    // its weight functions can use. `involved1[a]` lists the states of `l1`
    // with `a` in some outgoing support (ditto `involved2`), which gives a
    // cheap conservative dirtiness bound; clean pairs cannot have changed
    // verdicts, so skipping them leaves the removal order untouched.
    let mut involved1 = vec![Vec::new(); n1];
    let mut involved2 = vec![Vec::new(); n2];
    for s in l1.states() {
        let mut supp = BTreeSet::new();
        for t in l1.transitions_from(s) {
            supp.extend(t.dist.support());
        }
        for c in supp {
            involved1[c.index()].push(s);
        }
    }
    for s in l2.states() {
        let mut supp = BTreeSet::new();
        for t in l2.transitions_from(s) {
            supp.extend(t.dist.support());
        }
        for c in supp {
            involved2[c.index()].push(s);
        }
    }

    let mut dirty = PairSet::full(n1, n2);
    let mut start_removed = false;
    'fixpoint: loop {
        for s1 in l1.states() {
            for s2 in l2.states() {
                if !r.contains(s1, s2) || !dirty.contains(s1, s2) {
                    continue;
                }
                if let Some((mu1, action, challenges)) = find_violation(l1, l2, s1, s2, &r) {
                    r.remove(s1, s2);
                    trace.push(RemovalRecord {
                        pair: (s1, s2),
                        action,
                        mu1,
                        challenges,
                        snapshot: trace.len(),
                    });
                    for &d1 in &involved1[s1.index()] {
                        for &d2 in &involved2[s2.index()] {
                            dirty.insert(d1, d2);
                        }
                    }
                    if (s1, s2) == start {
                        start_removed = true;
                        if mode == ScanMode::EarlyExit {
                            break 'fixpoint;
                        }
                    }
                    continue 'fixpoint; // restart the scan from the top
                }
                dirty.remove(s1, s2);
            }
        }
        break;
    }
    SimCheck { n1, n2, start, holds: !start_removed, relation: r, trace }
}

/// The coarsest strong simulation, run to the full fixed point.
pub fn coarsest_simulation(l1: &Lpts, l2: &Lpts) -> SimCheck {
    check_simulation(l1, l2, ScanMode::Exhaustive)
}

/// Decides `l1 ⪯ l2` (with early exit on the start pair).
pub fn holds(l1: &Lpts, l2: &Lpts) -> bool {
    check_simulation(l1, l2, ScanMode::EarlyExit).holds
}

/// One iteration of the bottom-up tree algorithm: the processing of a single
/// non-leaf tree transition against all candidate partners. Only the row of
/// `state` can change between `r_before` and `r_after`.
#[derive(Clone, Debug)]
pub struct TreeSimIteration {
    pub state: StateId,
    /// Index into the tree's canonical transition list.
    pub transition: usize,
    pub r_before: PairSet,
    pub removed: Vec<StateId>,
    pub r_after: PairSet,
}

#[derive(Clone, Debug, Default)]
pub struct TreeSimLog {
    pub iterations: Vec<TreeSimIteration>,
}

/// Specialized simulation check for a stochastic tree `c` against `l`,
/// starting from the candidate relation `r0`.
///
/// Tree states reachable from the root are processed bottom-up (children
/// before parents, deepest first, ties by state id); each of a state's
/// transitions is one logged iteration. Because a child's row is final
/// before its parent is processed, a single pass reaches the fixed point:
/// the result equals the coarsest simulation restricted to reachable pairs.
pub fn tree_simulation(
    c: &Lpts,
    l: &Lpts,
    r0: &PairSet,
) -> Result<(PairSet, TreeSimLog), SimError> {
    if !classify(c).tree {
        return Err(SimError::NotATree);
    }
    if r0.dims() != (c.n_states(), l.n_states()) {
        return Err(SimError::DimensionMismatch);
    }
    // Depths via BFS from the root; unreachable states stay out of the run.
    let mut depth = vec![None; c.n_states()];
    depth[c.start().index()] = Some(0usize);
    let mut queue = std::collections::VecDeque::from([c.start()]);
    while let Some(s) = queue.pop_front() {
        let d = depth[s.index()].expect("queued with depth");
        for t in c.transitions_from(s) {
            for child in t.dist.support() {
                if depth[child.index()].is_none() {
                    depth[child.index()] = Some(d + 1);
                    queue.push_back(child);
                }
            }
        }
    }
    let mut order: Vec<StateId> = c
        .states()
        .filter(|&s| depth[s.index()].is_some() && !c.transitions_from(s).is_empty())
        .collect();
    order.sort_by_key(|&s| (std::cmp::Reverse(depth[s.index()].expect("reachable")), s));

    let mut r = r0.clone();
    let mut log = TreeSimLog::default();
    for s1 in order {
        for t1 in c.transitions_from(s1) {
            let transition = c
                .transitions()
                .iter()
                .position(|t| t.from == s1 && t == t1)
                .expect("transition belongs to the tree");
            let r_before = r.clone();
            let mut removed = Vec::new();
            for s2 in l.states() {
                if !r.contains(s1, s2) {
                    continue;
                }
                let ok = l
                    .transitions_on(s2, t1.action)
                    .iter()
                    .any(|t2| dist_leq(&t1.dist, &t2.dist, &r).holds());
                if !ok {
                    removed.push(s2);
                }
            }
            for &s2 in &removed {
                r.remove(s1, s2);
            }
            log.iterations.push(TreeSimIteration {
                state: s1,
                transition,
                r_before,
                removed,
                r_after: r.clone(),
            });
        }
    }
    Ok((r, log))
}

#[cfg(test)]
pub(crate) use tests::lpts as mklpts;
