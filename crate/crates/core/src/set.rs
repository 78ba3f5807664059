//! Fixed-width state sets.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A subset of `{0, .., universe-1}` stored as a membership bit vector.
///
/// Bits past `universe` are always zero, so two sets over the same universe
/// compare equal exactly when their words do.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateSet {
    universe: usize,
    words: Vec<u64>,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet {
            universe,
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s
    }

    pub fn singleton(universe: usize, q: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(q);
        s
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(universe: usize, items: I) -> Self {
        let mut s = Self::empty(universe);
        for q in items {
            s.insert(q);
        }
        s
    }

    /// Interprets the low `universe` bits of `bits` as a set (`universe <= 64`).
    pub fn from_bits(universe: usize, bits: u64) -> Self {
        assert!(universe <= 64);
        let mut s = Self::empty(universe);
        if universe > 0 {
            s.words[0] = bits;
            s.trim();
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.universe % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, q: usize) -> bool {
        q < self.universe && self.words[q / 64] & (1 << (q % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, q: usize) -> bool {
        assert!(q < self.universe, "state {q} outside universe {}", self.universe);
        let fresh = !self.contains(q);
        self.words[q / 64] |= 1 << (q % 64);
        fresh
    }

    #[inline]
    pub fn remove(&mut self, q: usize) -> bool {
        let present = self.contains(q);
        if present {
            self.words[q / 64] &= !(1 << (q % 64));
        }
        present
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s
    }

    pub fn complement(&self) -> StateSet {
        let mut s = self.clone();
        for w in s.words.iter_mut() {
            *w = !*w;
        }
        s.trim();
        s
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * 64 + b)
                }
            })
        })
    }

    /// Lifts the set into a larger universe, keeping member indices.
    pub fn widened(&self, universe: usize) -> StateSet {
        assert!(universe >= self.universe);
        StateSet::from_iter(universe, self.iter())
    }

    /// Restricts the set to a smaller universe, dropping members above it.
    pub fn narrowed(&self, universe: usize) -> StateSet {
        StateSet::from_iter(universe, self.iter().filter(|&q| q < universe))
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_encoding() {
        let a = StateSet::from_iter(70, [1, 65, 3]);
        let mut b = StateSet::full(70);
        for q in 0..70 {
            if ![1, 3, 65].contains(&q) {
                b.remove(q);
            }
        }
        assert_eq!(a, b);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![1, 3, 65]);
        assert_eq!(StateSet::full(70).complement(), StateSet::empty(70));
    }

    #[test]
    fn subset_and_ops() {
        let a = StateSet::from_iter(5, [0, 2]);
        let b = StateSet::from_iter(5, [0, 2, 4]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert_eq!(b.difference(&a), StateSet::singleton(5, 4));
        assert_eq!(a.complement().len(), 3);
        assert!(StateSet::empty(5).is_subset(&a));
    }
}
