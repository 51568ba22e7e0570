//! Finite subsets of `[n] = {1, …, n}` stored as bit vectors.
//!
//! Element `i` lives in bit `i - 1`. One machine word covers ground sets up
//! to 64 elements inline; larger sets spill into extra words.

use std::cmp::Ordering;
use std::fmt;

use smallvec::{smallvec, SmallVec};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ElementSet {
    // Trailing zero words are always trimmed so equality is structural.
    words: SmallVec<[u64; 1]>,
}

impl ElementSet {
    pub fn new() -> Self {
        ElementSet::default()
    }

    /// Set whose bit pattern is `bits` (element `i` ↔ bit `i - 1`).
    pub fn from_bits(bits: u64) -> Self {
        let mut s = ElementSet { words: smallvec![bits] };
        s.trim();
        s
    }

    /// Builds a set from 1-based elements. Zero is rejected by the caller's
    /// validation; here it is simply ignored by `insert`'s contract.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        let mut s = ElementSet::new();
        for e in elements {
            s.insert(e);
        }
        s
    }

    /// The full set `[n]`.
    pub fn full(n: usize) -> Self {
        ElementSet::from_elements(1..=n)
    }

    pub fn insert(&mut self, element: usize) {
        assert!(element >= 1, "elements are 1-based");
        let bit = element - 1;
        let word = bit / 64;
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1u64 << (bit % 64);
    }

    pub fn contains(&self, element: usize) -> bool {
        if element == 0 {
            return false;
        }
        let bit = element - 1;
        self.words
            .get(bit / 64)
            .is_some_and(|w| w & (1u64 << (bit % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// `|self ∩ other|` as a popcount.
    pub fn intersection_len(&self, other: &ElementSet) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        let mut s = ElementSet {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & b)
                .collect(),
        };
        s.trim();
        s
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let len = self.words.len().max(other.words.len());
        let words = (0..len)
            .map(|i| self.words.get(i).copied().unwrap_or(0) | other.words.get(i).copied().unwrap_or(0))
            .collect();
        ElementSet { words }
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// `[n] \ self`.
    pub fn complement(&self, n: usize) -> ElementSet {
        let full = ElementSet::full(n);
        let words = full
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| w & !self.words.get(i).copied().unwrap_or(0))
            .collect();
        let mut s = ElementSet { words };
        s.trim();
        s
    }

    /// Largest element, or `None` for the empty set.
    pub fn max_element(&self) -> Option<usize> {
        let (i, w) = self.words.iter().enumerate().rev().find(|(_, w)| **w != 0)?;
        Some(i * 64 + (64 - w.leading_zeros() as usize))
    }

    /// The single-word bit pattern, if the set fits in one word.
    pub fn as_bits(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    /// Ascending 1-based elements.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b + 1)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Applies `perm` where `perm[i - 1]` is the image of element `i`.
    pub fn relabel(&self, perm: &[usize]) -> ElementSet {
        ElementSet::from_elements(self.iter().map(|e| perm[e - 1]))
    }

    /// Compares the bit patterns as unsigned integers.
    pub fn cmp_bits(&self, other: &ElementSet) -> Ordering {
        self.words
            .len()
            .cmp(&other.words.len())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ElementSet::from_elements(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let s = ElementSet::from_elements([1, 3, 70]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(70) && !s.contains(2) && !s.contains(0));
        assert_eq!(s.to_vec(), vec![1, 3, 70]);
        assert_eq!(s.max_element(), Some(70));
        assert_eq!(s.as_bits(), None);
        assert_eq!(ElementSet::new().max_element(), None);
        assert_eq!(ElementSet::from_bits(0b101), ElementSet::from_elements([1, 3]));
    }

    #[test]
    fn complement_and_intersection() {
        let a = ElementSet::from_elements([1, 2]);
        let b = ElementSet::from_elements([2, 3]);
        assert_eq!(a.intersection_len(&b), 1);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.complement(4).to_vec(), vec![3, 4]);
        assert_eq!(ElementSet::full(3).complement(3), ElementSet::new());
        assert!(ElementSet::from_elements([2]).is_subset(&a));
        assert!(!b.is_subset(&a));
    }

    proptest! {
        #[test]
        fn multiword_matches_vec_model(
            xs in proptest::collection::btree_set(1usize..200, 0..20),
            ys in proptest::collection::btree_set(1usize..200, 0..20),
        ) {
            let a: ElementSet = xs.iter().copied().collect();
            let b: ElementSet = ys.iter().copied().collect();
            prop_assert_eq!(a.to_vec(), xs.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(a.intersection_len(&b), xs.intersection(&ys).count());
            prop_assert_eq!(a.union(&b).len(), xs.union(&ys).count());
            prop_assert_eq!(a.is_subset(&b), xs.is_subset(&ys));
            prop_assert_eq!(a.complement(200).len(), 200 - xs.len());
        }
    }
}
