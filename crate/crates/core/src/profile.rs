use serde::{Deserialize, Serialize};

use crate::dataset::Rating;
use crate::ids::ItemId;
use crate::scalar::Scalar;

/// A user's ratings keyed by item, stored sorted by item id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Profile<T> {
    entries: Vec<(ItemId, T)>,
}

impl<T: Scalar> Profile<T> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Builds a profile; for repeated items the last value wins.
    pub fn from_pairs<I: IntoIterator<Item = (ItemId, T)>>(pairs: I) -> Self {
        let mut entries: Vec<(ItemId, T)> = pairs.into_iter().collect();
        entries.reverse();
        entries.sort_by_key(|&(item, _)| item);
        entries.dedup_by_key(|&mut (item, _)| item);
        Self { entries }
    }

    pub fn from_ratings(ratings: &[Rating<T>]) -> Self {
        Self::from_pairs(ratings.iter().map(|r| (r.item, r.value)))
    }

    pub fn get(&self, item: ItemId) -> Option<T> {
        self.entries
            .binary_search_by_key(&item, |&(i, _)| i)
            .ok()
            .map(|pos| self.entries[pos].1)
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.get(item).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, T)> + '_ {
        self.entries.iter().copied()
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    pub fn entries(&self) -> &[(ItemId, T)] {
        &self.entries
    }

    pub fn mean(&self) -> Option<T> {
        if self.entries.is_empty() {
            return None;
        }
        let sum: T = self.entries.iter().map(|&(_, v)| v).sum();
        Some(sum / T::of_usize(self.entries.len()))
    }

    /// Calls `f(a, b)` for every item rated in both profiles, in item order.
    pub fn for_each_shared<F: FnMut(T, T)>(&self, other: &Profile<T>, mut f: F) {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    f(a[i].1, b[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl<T: Scalar> FromIterator<(ItemId, T)> for Profile<T> {
    fn from_iter<I: IntoIterator<Item = (ItemId, T)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}
