//! Fixed-capacity bit sets keyed by typed ids.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::marker::PhantomData;

use fixedbitset::FixedBitSet;

use crate::frame::{HistoryId, IndexId};

/// A dense integer id usable as a set element.
pub trait DenseId: Copy {
    fn from_usize(raw: usize) -> Self;
    fn to_usize(self) -> usize;
}

/// A set of ids drawn from `0..capacity`.
pub struct IdSet<K> {
    bits: FixedBitSet,
    _key: PhantomData<K>,
}

pub type IndexSet = IdSet<IndexId>;
pub type HistorySet = IdSet<HistoryId>;

impl<K: DenseId> IdSet<K> {
    pub fn empty(capacity: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(capacity),
            _key: PhantomData,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        Self {
            bits,
            _key: PhantomData,
        }
    }

    pub fn from_ids(capacity: usize, ids: impl IntoIterator<Item = K>) -> Self {
        let mut set = Self::empty(capacity);
        for id in ids {
            set.insert(id);
        }
        set
    }

    /// Builds a set from the low `capacity` bits of `mask`.
    pub fn from_mask(capacity: usize, mask: u64) -> Self {
        let mut set = Self::empty(capacity);
        for i in 0..capacity.min(64) {
            if mask >> i & 1 == 1 {
                set.bits.insert(i);
            }
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, id: K) {
        self.bits.insert(id.to_usize());
    }

    pub fn remove(&mut self, id: K) {
        self.bits.set(id.to_usize(), false);
    }

    pub fn contains(&self, id: K) -> bool {
        self.bits.contains(id.to_usize())
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &Self) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &Self) {
        self.bits.difference_with(&other.bits);
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    /// Elements in increasing id order.
    pub fn iter(&self) -> impl Iterator<Item = K> + '_ {
        self.bits.ones().map(K::from_usize)
    }

    pub fn first(&self) -> Option<K> {
        self.bits.minimum().map(K::from_usize)
    }
}

impl<K> Clone for IdSet<K> {
    fn clone(&self) -> Self {
        Self {
            bits: self.bits.clone(),
            _key: PhantomData,
        }
    }
}

impl<K> PartialEq for IdSet<K> {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl<K> Eq for IdSet<K> {}

impl<K> Hash for IdSet<K> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl<K: DenseId> fmt::Debug for IdSet<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}
