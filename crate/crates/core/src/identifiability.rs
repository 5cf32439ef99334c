//! How many of a user's items an observer must know to single out their
//! profile, and how many genres a profile spans.
//!
//! The identifying size of a profile is the smallest subset of its items
//! that no other profile contains. The search runs by iterative deepening
//! over subset sizes, visiting items rarest first, with each candidate
//! subset represented by the bitset of other profiles containing it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::GenreMap;
use crate::error::{Error, Result};
use crate::ids::ItemId;

pub const DEFAULT_SEARCH_CAP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identifiability {
    /// Smallest identifying subset has exactly this many items.
    Exact(usize),
    /// No subset of size up to the cap identifies the user.
    AboveCap,
    /// The whole profile is contained in some other profile.
    NotIdentifiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentifiabilityResult {
    pub outcome: Identifiability,
    pub search_cap: usize,
}

impl IdentifiabilityResult {
    /// False only when the search stopped at the cap.
    pub fn exact(&self) -> bool {
        !matches!(self.outcome, Identifiability::AboveCap)
    }

    /// Exact size, or `cap + 1` as a lower bound when capped; `None` when
    /// not identifiable.
    pub fn min_subset_size(&self) -> Option<usize> {
        match self.outcome {
            Identifiability::Exact(n) => Some(n),
            Identifiability::AboveCap => Some(self.search_cap + 1),
            Identifiability::NotIdentifiable => None,
        }
    }
}

/// Inverted index from item to the bitset of profiles containing it.
#[derive(Debug, Clone)]
pub struct ProfileIndex {
    words: usize,
    postings: HashMap<ItemId, Vec<u64>>,
}

impl ProfileIndex {
    pub fn new<P: AsRef<[ItemId]>>(profiles: &[P]) -> Self {
        let words = profiles.len().div_ceil(64).max(1);
        let mut postings: HashMap<ItemId, Vec<u64>> = HashMap::new();
        for (pos, p) in profiles.iter().enumerate() {
            for item in p.as_ref() {
                postings.entry(*item).or_insert_with(|| vec![0; words])[pos / 64] |=
                    1 << (pos % 64);
            }
        }
        Self { words, postings }
    }

    /// Identifying size of `items` against every indexed profile except the
    /// one at position `exclude`.
    pub fn identify(
        &self,
        items: &[ItemId],
        exclude: Option<usize>,
        cap: usize,
    ) -> Result<IdentifiabilityResult> {
        if cap == 0 {
            return Err(Error::InvalidParameter(
                "search cap must be at least 1".into(),
            ));
        }
        let unique: BTreeSet<ItemId> = items.iter().copied().collect();
        if unique.is_empty() {
            return Err(Error::Empty("profile".into()));
        }
        let mut sets: Vec<(u32, ItemId, Vec<u64>)> = unique
            .into_iter()
            .map(|item| {
                let mut bits = self
                    .postings
                    .get(&item)
                    .cloned()
                    .unwrap_or_else(|| vec![0; self.words]);
                if let Some(pos) = exclude {
                    bits[pos / 64] &= !(1 << (pos % 64));
                }
                let count = bits.iter().map(|w| w.count_ones()).sum();
                (count, item, bits)
            })
            .collect();
        let result = |outcome| {
            Ok(IdentifiabilityResult {
                outcome,
                search_cap: cap,
            })
        };
        if sets.iter().any(|(c, _, _)| *c == 0) {
            return result(Identifiability::Exact(1));
        }
        let mut all = vec![!0u64; self.words];
        for (_, _, bits) in &sets {
            and_into(&mut all, bits);
        }
        if all.iter().any(|&w| w != 0) {
            return result(Identifiability::NotIdentifiable);
        }
        sets.sort_by_key(|&(c, item, _)| (c, item));
        let bitsets: Vec<&[u64]> = sets.iter().map(|(_, _, b)| b.as_slice()).collect();
        let mut stack: Vec<Vec<u64>> = vec![vec![0; self.words]; bitsets.len() + 1];
        for size in 2..=cap.min(bitsets.len()) {
            stack[0].fill(!0);
            if search(&bitsets, size, 0, 0, &mut stack) {
                return result(Identifiability::Exact(size));
            }
        }
        result(Identifiability::AboveCap)
    }
}

fn and_into(acc: &mut [u64], bits: &[u64]) {
    for (a, b) in acc.iter_mut().zip(bits) {
        *a &= b;
    }
}

/// Depth-first search for a `size`-subset, extending `stack[depth]`, whose
/// containing set is empty.
fn search(
    sets: &[&[u64]],
    size: usize,
    depth: usize,
    start: usize,
    stack: &mut [Vec<u64>],
) -> bool {
    let remaining = size - depth;
    for i in start..=sets.len() - remaining {
        let (head, tail) = stack.split_at_mut(depth + 1);
        let next = &mut tail[0];
        next.copy_from_slice(&head[depth]);
        and_into(next, sets[i]);
        if remaining == 1 {
            if next.iter().all(|&w| w == 0) {
                return true;
            }
        } else if search(sets, size, depth + 1, i + 1, stack) {
            return true;
        }
    }
    false
}

/// Identifying size of `user_items` against the profiles in `others`.
pub fn min_identifying_subset<P: AsRef<[ItemId]>>(
    user_items: &[ItemId],
    others: &[P],
    cap: usize,
) -> Result<IdentifiabilityResult> {
    ProfileIndex::new(others).identify(user_items, None, cap)
}

/// Aggregate over one condition's users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifiabilityCell {
    /// Mean identifying size over exactly resolved, identifiable users.
    pub mean_min_subset_size: Option<f64>,
    pub users: usize,
    pub exact: usize,
    pub capped: usize,
    pub not_identifiable: usize,
}

/// Identifies each profile against all the others.
pub fn identify_all<P: AsRef<[ItemId]> + Sync>(
    profiles: &[P],
    cap: usize,
) -> Result<Vec<IdentifiabilityResult>> {
    let index = ProfileIndex::new(profiles);
    profiles
        .par_iter()
        .enumerate()
        .map(|(pos, p)| index.identify(p.as_ref(), Some(pos), cap))
        .collect()
}

pub fn summarize(results: &[IdentifiabilityResult]) -> IdentifiabilityCell {
    let sizes: Vec<usize> = results
        .iter()
        .filter_map(|r| match r.outcome {
            Identifiability::Exact(n) => Some(n),
            _ => None,
        })
        .collect();
    IdentifiabilityCell {
        mean_min_subset_size: (!sizes.is_empty())
            .then(|| sizes.iter().sum::<usize>() as f64 / sizes.len() as f64),
        users: results.len(),
        exact: sizes.len(),
        capped: results
            .iter()
            .filter(|r| r.outcome == Identifiability::AboveCap)
            .count(),
        not_identifiable: results
            .iter()
            .filter(|r| r.outcome == Identifiability::NotIdentifiable)
            .count(),
    }
}

/// Summaries per condition, each user compared against the other users'
/// minimized profiles of the same condition.
pub fn identifiability_table<K, P>(
    conditions: &BTreeMap<K, Vec<P>>,
    cap: usize,
) -> Result<BTreeMap<K, IdentifiabilityCell>>
where
    K: Ord + Clone,
    P: AsRef<[ItemId]> + Sync,
{
    conditions
        .iter()
        .map(|(key, profiles)| Ok((key.clone(), summarize(&identify_all(profiles, cap)?))))
        .collect()
}

/// Number of distinct genres over the items.
pub fn genre_breadth(items: &[ItemId], genres: &GenreMap) -> usize {
    let labels: BTreeSet<&str> = items
        .iter()
        .filter_map(|i| genres.get(i))
        .flatten()
        .map(String::as_str)
        .collect();
    labels.len()
}
