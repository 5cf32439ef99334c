//! Independent reference implementations used by the integration and
//! acceptance tests. They favour directness over speed and share no code
//! with the library beyond its plain data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recmin::{ItemId, Profile, Scale, UserId};

pub type Pairs = Vec<(ItemId, f64)>;

/// Random small system: `users` profiles over `items` items on the 0.5 step
/// scale, each with between `lo` and `hi` ratings.
pub fn random_system(
    seed: u64,
    users: u32,
    items: u32,
    lo: usize,
    hi: usize,
) -> BTreeMap<UserId, Pairs> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..users)
        .map(|u| {
            let size = rng.random_range(lo..=hi.min(items as usize));
            let mut chosen = BTreeSet::new();
            while chosen.len() < size {
                chosen.insert(rng.random_range(0..items));
            }
            let pairs = chosen
                .into_iter()
                .map(|i| (ItemId(i), rng.random_range(1..=10) as f64 * 0.5))
                .collect();
            (UserId(u), pairs)
        })
        .collect()
}

pub fn to_profiles(system: &BTreeMap<UserId, Pairs>) -> BTreeMap<UserId, Profile<f64>> {
    system
        .iter()
        .map(|(u, p)| (*u, p.iter().copied().collect()))
        .collect()
}

pub fn oracle_similarity(a: &Pairs, b: &Pairs, min_overlap: usize) -> f64 {
    let bm: HashMap<ItemId, f64> = b.iter().copied().collect();
    let diffs: Vec<f64> = a
        .iter()
        .filter_map(|(i, v)| bm.get(i).map(|w| (v - w).powi(2)))
        .collect();
    if diffs.is_empty() || diffs.len() < min_overlap {
        return 0.0;
    }
    let msd = diffs.iter().sum::<f64>() / diffs.len() as f64;
    1.0 / (msd + 1.0)
}

/// Top-k weighted mean with the item-mean and global-mean fallbacks.
pub fn oracle_knn(
    system: &BTreeMap<UserId, Pairs>,
    observed: &Pairs,
    item: ItemId,
    k: usize,
    scale: Scale<f64>,
) -> (f64, bool) {
    let mut neighbors: Vec<(f64, UserId, f64)> = Vec::new();
    for (u, p) in system {
        if let Some(&(_, r)) = p.iter().find(|(i, _)| *i == item) {
            let s = oracle_similarity(observed, p, 1);
            if s > 0.0 {
                neighbors.push((s, *u, r));
            }
        }
    }
    neighbors.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    neighbors.truncate(k);
    if !neighbors.is_empty() {
        let num: f64 = neighbors.iter().map(|n| n.0 * n.2).sum();
        let den: f64 = neighbors.iter().map(|n| n.0).sum();
        return ((num / den).clamp(scale.min, scale.max), true);
    }
    let item_ratings: Vec<f64> = system
        .values()
        .flat_map(|p| p.iter().filter(|(i, _)| *i == item).map(|(_, r)| *r))
        .collect();
    let mean = if item_ratings.is_empty() {
        let all: Vec<f64> = system
            .values()
            .flat_map(|p| p.iter().map(|(_, r)| *r))
            .collect();
        all.iter().sum::<f64>() / all.len() as f64
    } else {
        item_ratings.iter().sum::<f64>() / item_ratings.len() as f64
    };
    (mean.clamp(scale.min, scale.max), false)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn dcg(truths_in_order: &[f64], k: usize, exponential: bool) -> f64 {
    truths_in_order
        .iter()
        .take(k)
        .enumerate()
        .map(|(r, &t)| {
            let g = if exponential { 2f64.powf(t) - 1.0 } else { t };
            g / ((r + 2) as f64).log2()
        })
        .sum()
}

/// NDCG@k with the ideal DCG found by trying every ordering of the items.
pub fn oracle_ndcg(triples: &[(ItemId, f64, f64)], k: usize, exponential: bool) -> f64 {
    let mut ranked = triples.to_vec();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let actual = dcg(
        &ranked.iter().map(|t| t.2).collect::<Vec<_>>(),
        k,
        exponential,
    );
    let ideal = permutations(triples.len())
        .into_iter()
        .map(|perm| {
            dcg(
                &perm.iter().map(|&i| triples[i].2).collect::<Vec<_>>(),
                k,
                exponential,
            )
        })
        .fold(f64::NEG_INFINITY, f64::max);
    if ideal == 0.0 {
        1.0
    } else {
        actual / ideal
    }
}

/// Smallest subset of `items` that no profile in `others` contains, by
/// enumerating every subset in order of size; `None` if no subset works.
pub fn oracle_min_subset(items: &[ItemId], others: &[Vec<ItemId>]) -> Option<usize> {
    let n = items.len();
    assert!(n <= 16, "oracle enumerates 2^n subsets");
    let sets: Vec<BTreeSet<ItemId>> = others.iter().map(|o| o.iter().copied().collect()).collect();
    let mut best: Option<usize> = None;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if best.is_some_and(|b| b <= size) {
            continue;
        }
        let subset: Vec<ItemId> = (0..n)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| items[b])
            .collect();
        if !sets.iter().any(|s| subset.iter().all(|i| s.contains(i))) {
            best = Some(size);
        }
    }
    best
}

pub fn rmse_direct(pred: &[f64], truth: &[f64]) -> f64 {
    let se: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t).powi(2)).sum();
    (se / pred.len() as f64).sqrt()
}

/// Linear-interpolated quantile (type 7) of unsorted values.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}
