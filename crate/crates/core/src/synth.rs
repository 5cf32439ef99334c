//! Seeded synthetic ratings from a latent-factor taste model.
//!
//! A rating is `mu + b_u + b_i + p_u . q_i + noise`, clamped to the scale and
//! rounded to its step. Items are drawn per user with Zipf-like popularity
//! weights, profile sizes follow a shifted log-normal, and each item is
//! labelled with the genre of its dominant latent factor.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::{RatingsDataset, Scale};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seeding;

const TAG_USERS: u64 = 0x5359_4e55;
const TAG_ITEMS: u64 = 0x5359_4e49;

const GENRES: [&str; 18] = [
    "Action",
    "Adventure",
    "Animation",
    "Children",
    "Comedy",
    "Crime",
    "Documentary",
    "Drama",
    "Fantasy",
    "Film-Noir",
    "Horror",
    "Musical",
    "Mystery",
    "Romance",
    "Sci-Fi",
    "Thriller",
    "War",
    "Western",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub users: usize,
    pub items: usize,
    pub seed: u64,
    pub factors: usize,
    pub global_mean: f64,
    pub user_bias_std: f64,
    pub item_bias_std: f64,
    /// Standard deviation of the latent interaction term `p_u . q_i`.
    pub interaction_std: f64,
    /// Standard deviation of additive rating noise.
    pub noise: f64,
    pub min_profile: usize,
    /// Median of the log-normal part of the profile size.
    pub median_extra: f64,
    pub profile_sigma: f64,
    pub max_profile: usize,
    /// Exponent `a` of the popularity weight `1 / (rank + 1)^a`.
    pub popularity_exponent: f64,
    /// Round to the scale step; disable for continuous ratings.
    pub quantize: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            users: 500,
            items: 2000,
            seed: 0,
            factors: 8,
            global_mean: 3.5,
            user_bias_std: 0.35,
            item_bias_std: 0.45,
            interaction_std: 0.6,
            noise: 0.6,
            min_profile: 45,
            median_extra: 40.0,
            profile_sigma: 0.9,
            max_profile: 600,
            popularity_exponent: 0.8,
            quantize: true,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("synth {m}")));
        if self.users < 2 || self.items < 2 {
            return bad("needs at least 2 users and 2 items");
        }
        if self.factors == 0 {
            return bad("factors must be at least 1");
        }
        if self.min_profile == 0 || self.min_profile > self.max_profile {
            return bad("profile bounds must satisfy 1 <= min_profile <= max_profile");
        }
        let finite_nonneg = [
            self.user_bias_std,
            self.item_bias_std,
            self.interaction_std,
            self.noise,
            self.profile_sigma,
            self.popularity_exponent,
        ];
        if finite_nonneg.iter().any(|v| !(v.is_finite() && *v >= 0.0))
            || !self.global_mean.is_finite()
        {
            return bad("spreads must be finite and non-negative");
        }
        if !(self.median_extra.is_finite() && self.median_extra > 0.0) {
            return bad("median_extra must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthData<T> {
    /// Ratings with genres attached.
    pub dataset: RatingsDataset<T>,
    /// Genre labels for every generated item, rated or not, by item name.
    pub genres: BTreeMap<String, BTreeSet<String>>,
}

fn normal(std: f64) -> Normal<f64> {
    Normal::new(0.0, std).expect("validated standard deviation")
}

/// Generates a dataset on `scale`. Unquantized output uses a continuous
/// scale with the same bounds.
pub fn generate<T: Scalar>(config: &SynthConfig, scale: Scale<T>) -> Result<SynthData<T>> {
    config.validate()?;
    let scale = if config.quantize {
        scale
    } else {
        Scale::new(scale.min, scale.max, T::zero())?
    };
    let k = config.factors;
    // each factor entry has variance s^2 so that the dot product has variance k s^4
    let factor_std = (config.interaction_std.powi(2) / k as f64).sqrt().sqrt();

    let mut item_rng = seeding::rng(config.seed, TAG_ITEMS, 0);
    let item_factor = normal(factor_std);
    let item_bias = normal(config.item_bias_std);
    let mut q = vec![0.0; config.items * k];
    let mut b_i = vec![0.0; config.items];
    let mut genres = BTreeMap::new();
    for i in 0..config.items {
        for f in 0..k {
            q[i * k + f] = item_factor.sample(&mut item_rng);
        }
        b_i[i] = item_bias.sample(&mut item_rng);
        let row = &q[i * k..(i + 1) * k];
        let dominant = (0..k)
            .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0);
        let mut labels = BTreeSet::from([GENRES[dominant % GENRES.len()].to_string()]);
        if item_rng.random_bool(0.3) {
            labels.insert(GENRES[item_rng.random_range(0..GENRES.len())].to_string());
        }
        genres.insert((i + 1).to_string(), labels);
    }
    // popularity rank is a fixed shuffle of the item indices
    let mut ranked: Vec<usize> = (0..config.items).collect();
    rand::seq::SliceRandom::shuffle(ranked.as_mut_slice(), &mut item_rng);
    let mut weight = vec![0.0; config.items];
    for (rank, &i) in ranked.iter().enumerate() {
        weight[i] = ((rank + 1) as f64).powf(-config.popularity_exponent);
    }
    let indices: Vec<usize> = (0..config.items).collect();

    let size_dist = LogNormal::new(config.median_extra.ln(), config.profile_sigma)
        .map_err(|e| Error::InvalidParameter(format!("synth profile size: {e}")))?;
    let user_factor = normal(factor_std);
    let user_bias = normal(config.user_bias_std);
    let noise = normal(config.noise);
    let cap = config.max_profile.min(config.items);
    let mut rows = Vec::new();
    for u in 0..config.users {
        let mut rng = seeding::rng(config.seed, TAG_USERS, u as u64);
        let p: Vec<f64> = (0..k).map(|_| user_factor.sample(&mut rng)).collect();
        let b_u = user_bias.sample(&mut rng);
        let extra = size_dist.sample(&mut rng).floor() as usize;
        let size = (config.min_profile + extra)
            .min(cap)
            .max(config.min_profile.min(cap));
        let chosen = indices
            .choose_multiple_weighted(&mut rng, size, |&i| weight[i])
            .map_err(|e| Error::InvalidParameter(format!("synth item sampling: {e}")))?;
        let mut timestamp = 1_000_000_000 + rng.random_range(0..100_000_000i64);
        for &i in chosen {
            let dot: f64 = p
                .iter()
                .zip(&q[i * k..(i + 1) * k])
                .map(|(a, b)| a * b)
                .sum();
            let raw = config.global_mean + b_u + b_i[i] + dot + noise.sample(&mut rng);
            let mut value = scale.clamp(T::of(raw));
            if config.quantize {
                value = scale.quantize(value);
            }
            timestamp += rng.random_range(1..86_400i64);
            rows.push(((u + 1).to_string(), (i + 1).to_string(), value, timestamp));
        }
    }
    let (dataset, _) = RatingsDataset::from_raw(rows, scale)?;
    let (dataset, _) = dataset.with_genres(genres.clone());
    Ok(SynthData { dataset, genres })
}

/// Writes a `movieId,title,genres` file for the generated items.
pub fn write_movies<W: Write>(out: W, genres: &BTreeMap<String, BTreeSet<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["movieId", "title", "genres"])?;
    let mut ordered: Vec<(&String, &BTreeSet<String>)> = genres.iter().collect();
    ordered.sort_by_key(|(id, _)| id.parse::<u64>().unwrap_or(u64::MAX));
    for (id, labels) in ordered {
        let joined = if labels.is_empty() {
            "(no genres listed)".to_string()
        } else {
            labels.iter().cloned().collect::<Vec<_>>().join("|")
        };
        w.write_record([id.as_str(), &format!("Synthetic {id}"), &joined])?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}
