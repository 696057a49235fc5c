//! Core value types: states, actions, distributions and LPTSes.
//!
//! An LPTS is a tuple `⟨S, s0, α, τ⟩` where `τ ⊆ S × α × Dist(S)`. All values
//! here are immutable after construction; distributions are canonicalized
//! (entries sorted by state id, nonzero, summing to exactly 1) and transition
//! lists are sorted and deduplicated, so structural equality is meaningful
//! and every iteration order is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{rat_to_string, Rat};

/// Dense handle for a state; display names live in the owning [`Lpts`].
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Dense handle for an action; display names live in an [`ActionTable`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Side table mapping action ids to display names. All LPTSes that are meant
/// to be composed must share one table so that actions with equal names get
/// equal ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionTable {
    names: Vec<String>,
    index: BTreeMap<String, ActionId>,
}

impl ActionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, allocating one on first use.
    pub fn intern(&mut self, name: &str) -> ActionId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = ActionId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<ActionId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, a: ActionId) -> &str {
        &self.names[a.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Builds a table with names `a0, a1, …` — convenient for generated
    /// systems that never touch the parser.
    pub fn numbered(n: usize) -> Self {
        let mut t = Self::new();
        for i in 0..n {
            t.intern(&format!("a{i}"));
        }
        t
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistError {
    #[error("distribution sums to {0}, expected 1")]
    MassNotOne(String),
    #[error("non-positive weight {weight} for state {state:?}")]
    NonPositiveWeight { state: StateId, weight: String },
    #[error("empty distribution")]
    Empty,
}

/// A probability distribution over states: finitely many entries, all
/// strictly positive, summing to exactly 1. Entries are ordered by state id.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist {
    entries: BTreeMap<StateId, Rat>,
}

impl Dist {
    /// Builds a distribution, rejecting zero/negative weights and any total
    /// other than exactly 1. Duplicate states must be resolved by the caller
    /// (the map argument makes them unrepresentable).
    pub fn new(entries: BTreeMap<StateId, Rat>) -> Result<Self, DistError> {
        if entries.is_empty() {
            return Err(DistError::Empty);
        }
        let mut total = Rat::zero();
        for (&s, w) in &entries {
            if !w.is_positive() {
                return Err(DistError::NonPositiveWeight { state: s, weight: rat_to_string(w) });
            }
            total += w;
        }
        if !total.is_one() {
            return Err(DistError::MassNotOne(rat_to_string(&total)));
        }
        Ok(Dist { entries })
    }

    /// The Dirac (point-mass) distribution `δ_s`.
    pub fn dirac(s: StateId) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(s, Rat::one());
        Dist { entries }
    }

    /// `μ(T) = Σ_{s ∈ T} μ(s)`.
    pub fn mass<'a>(&self, set: impl IntoIterator<Item = &'a StateId>) -> Rat {
        let mut total = Rat::zero();
        let mut seen = BTreeSet::new();
        for s in set {
            if seen.insert(*s) {
                if let Some(w) = self.entries.get(s) {
                    total += w;
                }
            }
        }
        total
    }

    /// The set of states with nonzero probability, in id order.
    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.keys().copied()
    }

    pub fn support_set(&self) -> BTreeSet<StateId> {
        self.entries.keys().copied().collect()
    }

    /// `μ(s)`, zero when `s` is outside the support.
    pub fn get(&self, s: StateId) -> Rat {
        self.entries.get(&s).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.entries.contains_key(&s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rat)> + '_ {
        self.entries.iter().map(|(&s, w)| (s, w))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_dirac(&self) -> bool {
        self.entries.len() == 1
    }
}

impl fmt::Debug for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (s, w)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: s{}", rat_to_string(w), s.0)?;
        }
        write!(f, "}}")
    }
}

/// One element of `τ`: `from —action→ dist`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Transition {
    pub from: StateId,
    pub action: ActionId,
    pub dist: Dist,
}

/// A violation found while validating raw LPTS data. Locations are reported
/// as transition indices plus the offending names/ids so front ends (such as
/// the parser) can attach positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The distribution of transition `index` does not sum to 1.
    MassNotOne { index: usize, total: String },
    /// A non-positive weight in the distribution of transition `index`.
    NonPositiveWeight { index: usize, weight: String },
    /// The distribution of transition `index` has no entries.
    EmptyDistribution { index: usize },
    /// Transition `index` mentions a state outside `S`.
    DanglingState { index: usize, state: StateId },
    /// Transition `index` is labeled by an action outside the alphabet.
    UnknownAction { index: usize, action: ActionId },
    /// The start state is outside `S`.
    StartOutOfRange { start: StateId },
    /// The LPTS has no states at all.
    NoStates,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MassNotOne { index, total } => {
                write!(f, "transition #{index}: distribution sums to {total}")
            }
            Violation::NonPositiveWeight { index, weight } => {
                write!(f, "transition #{index}: non-positive probability {weight}")
            }
            Violation::EmptyDistribution { index } => {
                write!(f, "transition #{index}: empty distribution")
            }
            Violation::DanglingState { index, state } => {
                write!(f, "transition #{index}: unknown state id {}", state.0)
            }
            Violation::UnknownAction { index, action } => {
                write!(f, "transition #{index}: action id {} outside the alphabet", action.0)
            }
            Violation::StartOutOfRange { start } => {
                write!(f, "start state id {} outside the state set", start.0)
            }
            Violation::NoStates => write!(f, "no states"),
        }
    }
}

/// Unvalidated LPTS data, as produced by the parser or by generators. Weights
/// here may be arbitrary rationals; [`RawLpts::validate`] reports every
/// violation and [`RawLpts::build`] converts into a checked [`Lpts`].
#[derive(Clone, Debug, Default)]
pub struct RawLpts {
    pub name: String,
    pub states: Vec<String>,
    pub start: StateId,
    pub alphabet: BTreeSet<ActionId>,
    pub transitions: Vec<RawTransition>,
}

#[derive(Clone, Debug)]
pub struct RawTransition {
    pub from: StateId,
    pub action: ActionId,
    pub entries: Vec<(StateId, Rat)>,
}

impl RawLpts {
    /// Checks every structural invariant and reports all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.states.len();
        if n == 0 {
            out.push(Violation::NoStates);
            return out;
        }
        if self.start.index() >= n {
            out.push(Violation::StartOutOfRange { start: self.start });
        }
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from.index() >= n {
                out.push(Violation::DanglingState { index: i, state: t.from });
            }
            if !self.alphabet.contains(&t.action) {
                out.push(Violation::UnknownAction { index: i, action: t.action });
            }
            if t.entries.is_empty() {
                out.push(Violation::EmptyDistribution { index: i });
                continue;
            }
            let mut total = Rat::zero();
            let mut bad_weight = false;
            for (s, w) in &t.entries {
                if s.index() >= n {
                    out.push(Violation::DanglingState { index: i, state: *s });
                }
                if w.is_positive() {
                    total += w;
                } else {
                    bad_weight = true;
                    out.push(Violation::NonPositiveWeight { index: i, weight: rat_to_string(w) });
                }
            }
            if !bad_weight && !total.is_one() {
                out.push(Violation::MassNotOne { index: i, total: rat_to_string(&total) });
            }
        }
        out
    }

    /// Validates and canonicalizes into an [`Lpts`].
    pub fn build(self) -> Result<Lpts, Vec<Violation>> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(violations);
        }
        let transitions = self
            .transitions
            .into_iter()
            .map(|t| Transition {
                from: t.from,
                action: t.action,
                dist: Dist::new(t.entries.into_iter().collect()).expect("validated"),
            })
            .collect();
        Ok(Lpts::from_parts(self.name, self.states, self.start, self.alphabet, transitions))
    }
}

/// Classification flags for an LPTS; see [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LptsKind {
    /// At most one transition per (state, action).
    pub reactive: bool,
    /// At most one transition per state.
    pub fully_probabilistic: bool,
    /// The start state is in no distribution's support and every other state
    /// is in the support of exactly one distribution.
    pub tree: bool,
}

/// A labeled probabilistic transition system. Immutable after construction;
/// transitions are sorted by `(from, action, dist)` and deduplicated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lpts {
    name: String,
    states: Vec<String>,
    start: StateId,
    alphabet: BTreeSet<ActionId>,
    transitions: Vec<Transition>,
}

impl Lpts {
    /// Builds an LPTS from checked parts, canonicalizing transition order.
    /// Callers must guarantee that ids are in range and actions are in the
    /// alphabet — use [`RawLpts::build`] for unchecked data.
    pub(crate) fn from_parts(
        name: String,
        states: Vec<String>,
        start: StateId,
        alphabet: BTreeSet<ActionId>,
        mut transitions: Vec<Transition>,
    ) -> Self {
        transitions.sort();
        transitions.dedup();
        debug_assert!(start.index() < states.len());
        debug_assert!(transitions.iter().all(|t| {
            t.from.index() < states.len()
                && alphabet.contains(&t.action)
                && t.dist.support().all(|s| s.index() < states.len())
        }));
        Lpts { name, states, start, alphabet, transitions }
    }

    /// Builds and fully validates an LPTS from typed parts.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        start: StateId,
        alphabet: BTreeSet<ActionId>,
        transitions: Vec<Transition>,
    ) -> Result<Self, Vec<Violation>> {
        let raw = RawLpts {
            name: name.into(),
            states,
            start,
            alphabet,
            transitions: transitions
                .into_iter()
                .map(|t| RawTransition {
                    from: t.from,
                    action: t.action,
                    entries: t.dist.iter().map(|(s, w)| (s, w.clone())).collect(),
                })
                .collect(),
        };
        raw.build()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn alphabet(&self) -> &BTreeSet<ActionId> {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// All transitions leaving `s`, in canonical order.
    pub fn transitions_from(&self, s: StateId) -> &[Transition] {
        let lo = self.transitions.partition_point(|t| t.from < s);
        let hi = self.transitions.partition_point(|t| t.from <= s);
        &self.transitions[lo..hi]
    }

    /// All transitions leaving `s` labeled `a`, in canonical order.
    pub fn transitions_on(&self, s: StateId, a: ActionId) -> &[Transition] {
        let lo = self.transitions.partition_point(|t| (t.from, t.action) < (s, a));
        let hi = self.transitions.partition_point(|t| (t.from, t.action) <= (s, a));
        &self.transitions[lo..hi]
    }

    /// Replaces the display name (used when deriving systems such as
    /// quotients or compositions, and when emitting under a fresh name).
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Re-expresses this LPTS under the table `to`, matching actions by name
    /// through `from` (the table its current ids refer to). Action ids are
    /// file-scoped, so systems parsed from different files must be brought
    /// into one table before they can be compared.
    pub fn retable(&self, from: &ActionTable, to: &ActionTable) -> Result<Lpts, RetableError> {
        let map = |a: ActionId| {
            to.lookup(from.name(a))
                .ok_or_else(|| RetableError::UnknownAction(from.name(a).to_string()))
        };
        let alphabet = self
            .alphabet
            .iter()
            .map(|&a| map(a))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let transitions = self
            .transitions
            .iter()
            .map(|t| {
                Ok(Transition { from: t.from, action: map(t.action)?, dist: t.dist.clone() })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Lpts::from_parts(
            self.name.clone(),
            self.states.clone(),
            self.start,
            alphabet,
            transitions,
        ))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RetableError {
    #[error("action {0:?} does not exist in the target table")]
    UnknownAction(String),
}

/// Computes the reactive / fully-probabilistic / tree flags of `l`.
///
/// The flags depend only on the transition structure, so they are stable
/// under state renaming.
pub fn classify(l: &Lpts) -> LptsKind {
    let mut reactive = true;
    let mut fully_probabilistic = true;
    for w in l.transitions().windows(2) {
        if w[0].from == w[1].from {
            fully_probabilistic = false;
            if w[0].action == w[1].action {
                reactive = false;
            }
        }
    }
    // Tree: count, for every state, the number of distribution supports
    // containing it.
    let mut containing = vec![0usize; l.n_states()];
    for t in l.transitions() {
        for s in t.dist.support() {
            containing[s.index()] += 1;
        }
    }
    let tree = l.states().all(|s| {
        if s == l.start() {
            containing[s.index()] == 0
        } else {
            containing[s.index()] == 1
        }
    });
    LptsKind { reactive, fully_probabilistic, tree }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompleteSpecError {
    #[error("spec alphabet is not a subset of the target alphabet")]
    AlphabetNotContained,
}

/// Completes a specification to `target`: every action in
/// `target \ α_P` gains a Dirac self-loop at every state. The result has
/// alphabet `target`; behavior restricted to `α_P` is unchanged.
pub fn complete_spec(p: &Lpts, target: &BTreeSet<ActionId>) -> Result<Lpts, CompleteSpecError> {
    if !p.alphabet().is_subset(target) {
        return Err(CompleteSpecError::AlphabetNotContained);
    }
    let missing: Vec<ActionId> = target.difference(p.alphabet()).copied().collect();
    let mut transitions = p.transitions().to_vec();
    for s in p.states() {
        for &a in &missing {
            transitions.push(Transition { from: s, action: a, dist: Dist::dirac(s) });
        }
    }
    Ok(Lpts::from_parts(
        p.name().to_string(),
        p.state_names().to_vec(),
        p.start(),
        target.clone(),
        transitions,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn dist(entries: &[(u32, Rat)]) -> Dist {
        Dist::new(entries.iter().map(|(s, w)| (StateId(*s), w.clone())).collect()).unwrap()
    }

    #[test]
    fn dirac_is_a_point_mass() {
        let d = Dist::dirac(StateId(3));
        assert_eq!(d.get(StateId(3)), rat(1, 1));
        assert_eq!(d.get(StateId(0)), rat(0, 1));
        assert_eq!(d.support().collect::<Vec<_>>(), vec![StateId(3)]);
        assert!(d.is_dirac());
    }

    #[test]
    fn mass_sums_over_subsets() {
        let d = dist(&[(0, rat(1, 10)), (1, rat(9, 10))]);
        assert_eq!(d.mass(&[StateId(0)]), rat(1, 10));
        assert_eq!(d.mass(&[StateId(0), StateId(1)]), rat(1, 1));
        assert_eq!(d.mass(&[StateId(7)]), rat(0, 1));
        // Duplicate mentions must not double count.
        assert_eq!(d.mass(&[StateId(1), StateId(1)]), rat(9, 10));
    }

    #[test]
    fn dist_rejects_bad_mass() {
        let err = Dist::new([(StateId(0), rat(1, 2)), (StateId(1), rat(1, 3))].into_iter().collect());
        assert_eq!(err.unwrap_err(), DistError::MassNotOne("5/6".into()));
        let err = Dist::new([(StateId(0), rat(0, 1)), (StateId(1), rat(1, 1))].into_iter().collect());
        assert!(matches!(err.unwrap_err(), DistError::NonPositiveWeight { .. }));
    }

    fn two_state(transitions: Vec<RawTransition>) -> RawLpts {
        RawLpts {
            name: "T".into(),
            states: vec!["s0".into(), "s1".into()],
            start: StateId(0),
            alphabet: [ActionId(0), ActionId(1)].into_iter().collect(),
            transitions,
        }
    }

    #[test]
    fn validate_accepts_well_formed() {
        let raw = two_state(vec![RawTransition {
            from: StateId(0),
            action: ActionId(0),
            entries: vec![(StateId(0), rat(1, 2)), (StateId(1), rat(1, 2))],
        }]);
        assert!(raw.validate().is_empty());
        raw.build().unwrap();
    }

    #[test]
    fn validate_reports_mass_violation_with_location() {
        let raw = two_state(vec![RawTransition {
            from: StateId(0),
            action: ActionId(0),
            entries: vec![(StateId(1), rat(9, 10))],
        }]);
        let v = raw.validate();
        assert_eq!(v, vec![Violation::MassNotOne { index: 0, total: "9/10".into() }]);
        assert_eq!(v[0].to_string(), "transition #0: distribution sums to 9/10");
    }

    #[test]
    fn validate_reports_unknown_action() {
        let raw = two_state(vec![RawTransition {
            from: StateId(0),
            action: ActionId(7),
            entries: vec![(StateId(1), rat(1, 1))],
        }]);
        assert_eq!(raw.validate(), vec![Violation::UnknownAction { index: 0, action: ActionId(7) }]);
    }

    fn lpts(n: usize, transitions: Vec<(u32, u32, Vec<(u32, Rat)>)>) -> Lpts {
        let alphabet: BTreeSet<ActionId> = (0..4).map(ActionId).collect();
        RawLpts {
            name: "L".into(),
            states: (0..n).map(|i| format!("s{i}")).collect(),
            start: StateId(0),
            alphabet,
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
    fn classify_reactive_lts() {
        // A two-state LTS with Dirac transitions on distinct actions is
        // reactive; with a single transition it'd also be fully probabilistic.
        let l = lpts(2, vec![(0, 0, vec![(1, rat(1, 1))]), (1, 1, vec![(0, rat(1, 1))])]);
        let k = classify(&l);
        assert!(k.reactive);
        assert!(k.fully_probabilistic);
        assert!(!k.tree); // cycle through the start state

        let two_a = lpts(2, vec![(0, 0, vec![(1, rat(1, 1))]), (0, 0, vec![(0, rat(1, 2)), (1, rat(1, 2))])]);
        let k = classify(&two_a);
        assert!(!k.reactive);
        assert!(!k.fully_probabilistic);
    }

    #[test]
    fn classify_tree() {
        // root →a {1/2: s1, 1/2: s2}; s1 →b δ(s3): a genuine tree.
        let t = lpts(
            4,
            vec![
                (0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))]),
                (1, 1, vec![(3, rat(1, 1))]),
            ],
        );
        assert!(classify(&t).tree);
        // A state in two supports breaks the tree property.
        let not_tree = lpts(
            3,
            vec![
                (0, 0, vec![(1, rat(1, 1))]),
                (0, 1, vec![(1, rat(1, 2)), (2, rat(1, 2))]),
            ],
        );
        assert!(!classify(&not_tree).tree);
    }

    #[test]
    fn classify_is_stable_under_renaming() {
        let l = lpts(3, vec![(0, 0, vec![(1, rat(1, 2)), (2, rat(1, 2))])]);
        let renamed = Lpts::from_parts(
            "renamed".into(),
            vec!["x".into(), "y".into(), "z".into()],
            l.start(),
            l.alphabet().clone(),
            l.transitions().to_vec(),
        );
        assert_eq!(classify(&l), classify(&renamed));
    }

    #[test]
    fn complete_spec_adds_dirac_self_loops() {
        let p = lpts(1, vec![(0, 0, vec![(0, rat(1, 1))])]);
        // p's alphabet is {0..3}; completing to a superset adds loops on the
        // new action at every state.
        let mut target: BTreeSet<ActionId> = p.alphabet().clone();
        target.insert(ActionId(9));
        let c = complete_spec(&p, &target).unwrap();
        assert_eq!(c.transitions().len(), 2);
        assert!(c
            .transitions()
            .iter()
            .any(|t| t.action == ActionId(9) && t.dist == Dist::dirac(StateId(0))));
        // Completing to the same alphabet is the identity.
        let same = complete_spec(&p, p.alphabet()).unwrap();
        assert_eq!(same, p);
        // Shrinking is an error.
        assert!(complete_spec(&c, p.alphabet()).is_err());
    }

    #[test]
    fn transitions_on_uses_canonical_order() {
        let l = lpts(
            3,
            vec![
                (0, 1, vec![(1, rat(1, 1))]),
                (0, 0, vec![(2, rat(1, 1))]),
                (1, 0, vec![(2, rat(1, 1))]),
            ],
        );
        let from0 = l.transitions_from(StateId(0));
        assert_eq!(from0.len(), 2);
        assert!(from0[0].action < from0[1].action);
        assert_eq!(l.transitions_on(StateId(0), ActionId(1)).len(), 1);
        assert_eq!(l.transitions_on(StateId(2), ActionId(0)).len(), 0);
    }

    #[test]
    fn retable_matches_actions_by_name() {
        let mut from = ActionTable::new();
        for n in ["send", "ack", "go", "stop"] {
            from.intern(n);
        }
        let mut to = ActionTable::new();
        for n in ["extra", "stop", "go", "ack", "send"] {
            to.intern(n);
        }
        let l = lpts(2, vec![(0, 0, vec![(1, rat(1, 1))]), (1, 1, vec![(0, rat(1, 1))])]);
        let r = l.retable(&from, &to).unwrap();
        // "send" was id 0, now id 4; "ack" was 1, now 3.
        assert_eq!(r.transitions_on(StateId(0), ActionId(4)).len(), 1);
        assert_eq!(r.transitions_on(StateId(1), ActionId(3)).len(), 1);
        assert_eq!(
            r.alphabet(),
            &BTreeSet::from([ActionId(1), ActionId(2), ActionId(3), ActionId(4)])
        );
        // Mapping back is the identity.
        assert_eq!(r.retable(&to, &from).unwrap(), l);
        // A missing name is an error.
        let empty = ActionTable::new();
        assert_eq!(
            l.retable(&from, &empty),
            Err(RetableError::UnknownAction("send".into()))
        );
    }
}
