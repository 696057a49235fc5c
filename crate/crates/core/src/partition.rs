//! Partitions of a state space into equivalence classes.
//!
//! A [`Partition`] is kept in canonical form: every class is a sorted,
//! non-empty set of states, and the classes themselves are ordered by their
//! smallest member. Canonical form makes quotient construction and
//! refinement deterministic, and lets partitions be compared for equality
//! directly.

use std::collections::BTreeSet;

use crate::model::StateId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    classes: Vec<BTreeSet<StateId>>,
    /// `class_of[s]` = index into `classes`.
    class_of: Vec<usize>,
}

impl Partition {
    /// The coarsest partition: a single class containing all `n` states.
    pub fn coarsest(n: usize) -> Self {
        assert!(n > 0, "partition of an empty state space");
        Partition {
            n,
            classes: vec![(0..n as u32).map(StateId).collect()],
            class_of: vec![0; n],
        }
    }

    /// The finest partition: every state in its own class.
    pub fn singletons(n: usize) -> Self {
        assert!(n > 0, "partition of an empty state space");
        Partition {
            n,
            classes: (0..n as u32).map(|i| [StateId(i)].into()).collect(),
            class_of: (0..n).collect(),
        }
    }

    /// Builds a partition from explicit classes; they must cover `0..n`
    /// exactly once each.
    pub fn from_classes(n: usize, classes: Vec<BTreeSet<StateId>>) -> Self {
        let mut seen = vec![false; n];
        for class in &classes {
            assert!(!class.is_empty(), "empty class");
            for s in class {
                assert!(s.index() < n, "state out of range");
                assert!(!seen[s.index()], "state in two classes");
                seen[s.index()] = true;
            }
        }
        assert!(seen.iter().all(|&b| b), "state in no class");
        let mut p = Partition { n, classes, class_of: vec![0; n] };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        self.classes.sort_by_key(|class| *class.iter().next().expect("non-empty class"));
        for (i, class) in self.classes.iter().enumerate() {
            for s in class {
                self.class_of[s.index()] = i;
            }
        }
    }

    pub fn n_states(&self) -> usize {
        self.n
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[BTreeSet<StateId>] {
        &self.classes
    }

    /// The index of the class containing `s`.
    pub fn class_of(&self, s: StateId) -> usize {
        self.class_of[s.index()]
    }

    /// The members of the class containing `s`.
    pub fn class_members(&self, s: StateId) -> &BTreeSet<StateId> {
        &self.classes[self.class_of(s)]
    }

    pub fn same_class(&self, a: StateId, b: StateId) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    /// Splits the class containing `pivot` into its intersection with
    /// `splitter` and the rest. Returns `true` iff this was a proper split
    /// (both sides non-empty); a trivial cut leaves the partition unchanged.
    pub fn split_class(&mut self, pivot: StateId, splitter: &BTreeSet<StateId>) -> bool {
        let idx = self.class_of(pivot);
        let class = &self.classes[idx];
        let inside: BTreeSet<StateId> = class.intersection(splitter).copied().collect();
        if inside.is_empty() || inside.len() == class.len() {
            return false;
        }
        let outside: BTreeSet<StateId> = class.difference(&inside).copied().collect();
        self.classes[idx] = inside;
        self.classes.push(outside);
        self.canonicalize();
        true
    }

    /// True iff `self` refines `other`: every class of `self` is contained
    /// in a class of `other`.
    pub fn is_finer_than(&self, other: &Partition) -> bool {
        self.n == other.n
            && self.classes.iter().all(|class| {
                let mut it = class.iter();
                let first = it.next().expect("non-empty class");
                it.all(|s| other.same_class(*first, *s))
            })
    }
}
