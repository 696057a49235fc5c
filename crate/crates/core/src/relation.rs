//! Binary relations over state pairs, stored as bit matrices.

use std::collections::BTreeSet;

use crate::model::StateId;

/// A relation `R ⊆ S1 × S2` over dense state ids, stored row-major as a
/// bitset. All iteration is in lexicographic `(s1, s2)` order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairSet {
    n1: usize,
    n2: usize,
    bits: Vec<u64>,
}

impl PairSet {
    pub fn empty(n1: usize, n2: usize) -> Self {
        let words = (n1 * n2 + 63) / 64;
        PairSet { n1, n2, bits: vec![0; words] }
    }

    pub fn full(n1: usize, n2: usize) -> Self {
        let mut r = Self::empty(n1, n2);
        for w in &mut r.bits {
            *w = !0;
        }
        // Clear the tail beyond n1*n2.
        let total = n1 * n2;
        if total % 64 != 0 && !r.bits.is_empty() {
            let last = r.bits.len() - 1;
            r.bits[last] &= (1u64 << (total % 64)) - 1;
        }
        r
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    fn bit(&self, s1: StateId, s2: StateId) -> usize {
        debug_assert!(s1.index() < self.n1 && s2.index() < self.n2);
        s1.index() * self.n2 + s2.index()
    }

    pub fn contains(&self, s1: StateId, s2: StateId) -> bool {
        let b = self.bit(s1, s2);
        self.bits[b / 64] >> (b % 64) & 1 == 1
    }

    pub fn insert(&mut self, s1: StateId, s2: StateId) -> bool {
        let b = self.bit(s1, s2);
        let had = self.bits[b / 64] >> (b % 64) & 1 == 1;
        self.bits[b / 64] |= 1 << (b % 64);
        !had
    }

    pub fn remove(&mut self, s1: StateId, s2: StateId) -> bool {
        let b = self.bit(s1, s2);
        let had = self.bits[b / 64] >> (b % 64) & 1 == 1;
        self.bits[b / 64] &= !(1 << (b % 64));
        had
    }

    /// All `s2` related to `s1`, in id order.
    pub fn row(&self, s1: StateId) -> impl Iterator<Item = StateId> + '_ {
        let n2 = self.n2;
        (0..n2 as u32).map(StateId).filter(move |&s2| self.contains(s1, s2))
    }

    pub fn row_set(&self, s1: StateId) -> BTreeSet<StateId> {
        self.row(s1).collect()
    }

    pub fn row_is_empty(&self, s1: StateId) -> bool {
        self.row(s1).next().is_none()
    }

    /// `R(T) = ⋃_{s ∈ T} R(s)`.
    pub fn image<'a>(&self, set: impl IntoIterator<Item = &'a StateId>) -> BTreeSet<StateId> {
        let mut out = BTreeSet::new();
        for &s1 in set {
            out.extend(self.row(s1));
        }
        out
    }

    /// All pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        (0..self.n1 as u32).flat_map(move |i| {
            (0..self.n2 as u32).filter_map(move |j| {
                let (s1, s2) = (StateId(i), StateId(j));
                self.contains(s1, s2).then_some((s1, s2))
            })
        })
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|w| *w == 0)
    }

    pub fn is_subset(&self, other: &PairSet) -> bool {
        debug_assert_eq!(self.dims(), other.dims());
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}
