//! Biased matrix factorization (FunkSVD) trained by stochastic gradient
//! descent, with per-user fold-in against frozen item parameters.
//!
//! Prediction is `mu + b_u + b_i + q_i . p_u` (or `q_i . p_u` when the
//! model is unbiased). Each SGD step descends the per-rating loss
//! `0.5 * err^2 + 0.5 * reg * (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2)`.
//! Training visits ratings sorted by (user, item) in every epoch.

use std::fs;
use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::{Rating, Scale};
use crate::error::{Error, Result};
use crate::ids::{ItemId, UserId};
use crate::profile::Profile;
use crate::recommender::Prediction;
use crate::scalar::Scalar;
use crate::seeding::{self, stream, Rng};

pub const SNAPSHOT_FORMAT: &str = "recmin-svd";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvdConfig {
    pub factors: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub init_std: f64,
    pub biased: bool,
    pub seed: u64,
}

impl Default for SvdConfig {
    fn default() -> Self {
        Self {
            factors: 30,
            epochs: 20,
            learning_rate: 0.005,
            regularization: 0.02,
            init_std: 0.1,
            biased: true,
            seed: 0,
        }
    }
}

impl SvdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(format!("svd {m}")));
        if self.factors == 0 {
            return bad("factors must be at least 1");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return bad("regularization must be non-negative");
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return bad("init_std must be non-negative");
        }
        Ok(())
    }
}

/// Parameter groups, used to address single parameters in gradient checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamClass {
    UserBias,
    UserFactor,
    ItemBias,
    ItemFactor,
}

/// Gradient of the regularized training loss, laid out like the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdGradient<T> {
    pub user_bias: Vec<T>,
    pub user_factors: Vec<T>,
    pub item_bias: Vec<T>,
    pub item_factors: Vec<T>,
}

impl<T: Scalar> SvdGradient<T> {
    pub fn get(&self, class: ParamClass, index: usize) -> T {
        match class {
            ParamClass::UserBias => self.user_bias[index],
            ParamClass::UserFactor => self.user_factors[index],
            ParamClass::ItemBias => self.item_bias[index],
            ParamClass::ItemFactor => self.item_factors[index],
        }
    }
}

/// A user fitted against a frozen model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldedUser<T> {
    pub factors: Vec<T>,
    pub bias: T,
    pub trained_on: Vec<ItemId>,
    /// Observed ratings skipped because the model does not know the item.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdModel<T> {
    config: SvdConfig,
    scale: Scale<T>,
    global_mean: T,
    users: Vec<UserId>,
    user_bias: Vec<T>,
    user_factors: Vec<T>,
    items: Vec<ItemId>,
    item_bias: Vec<T>,
    item_factors: Vec<T>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot<T> {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: SvdModel<T>,
}

struct Indexed<T> {
    user: usize,
    item: usize,
    value: T,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn normal_fill<T: Scalar>(rng: &mut Rng, std: f64, out: &mut [T]) {
    for v in out {
        let z: f64 = rng.sample(StandardNormal);
        *v = T::of(z * std);
    }
}

/// Per-rating loss terms for one (user, item) pair.
struct Example<'a, T> {
    bu: T,
    bi: T,
    pu: &'a [T],
    qi: &'a [T],
}

impl<T: Scalar> SvdModel<T> {
    pub fn train(ratings: &[Rating<T>], scale: Scale<T>, config: SvdConfig) -> Result<Self> {
        Ok(Self::train_with_history(ratings, scale, config, false)?.0)
    }

    /// Trains and, if `record` is set, returns the regularized training loss
    /// after every epoch.
    pub fn train_with_history(
        ratings: &[Rating<T>],
        scale: Scale<T>,
        config: SvdConfig,
        record: bool,
    ) -> Result<(Self, Vec<T>)> {
        config.validate()?;
        if ratings.is_empty() {
            return Err(Error::Empty("svd training data".into()));
        }
        let mut model = Self::initialize(ratings, scale, config);
        let data = model.index(ratings);
        let lr = T::of(config.learning_rate);
        let reg = T::of(config.regularization);
        let f = config.factors;
        let mut d_p = vec![T::zero(); f];
        let mut d_q = vec![T::zero(); f];
        let mut history = Vec::new();
        for _ in 0..config.epochs {
            for ex in &data {
                let (u, i) = (ex.user, ex.item);
                let (d_bu, d_bi) = {
                    let e = model.example(u, i);
                    model.example_gradient(&e, ex.value, reg, &mut d_p, &mut d_q)
                };
                if config.biased {
                    model.user_bias[u] -= lr * d_bu;
                    model.item_bias[i] -= lr * d_bi;
                }
                for k in 0..f {
                    model.user_factors[u * f + k] -= lr * d_p[k];
                    model.item_factors[i * f + k] -= lr * d_q[k];
                }
            }
            if record {
                history.push(model.loss_indexed(&data));
            }
        }
        Ok((model, history))
    }

    fn initialize(ratings: &[Rating<T>], scale: Scale<T>, config: SvdConfig) -> Self {
        let mut users: Vec<UserId> = ratings.iter().map(|r| r.user).collect();
        users.sort();
        users.dedup();
        let mut items: Vec<ItemId> = ratings.iter().map(|r| r.item).collect();
        items.sort();
        items.dedup();
        let sum: T = ratings.iter().map(|r| r.value).sum();
        let global_mean = sum / T::of_usize(ratings.len());
        let f = config.factors;
        let mut rng = seeding::rng(config.seed, stream::SVD_INIT, 0);
        let mut user_factors = vec![T::zero(); users.len() * f];
        let mut item_factors = vec![T::zero(); items.len() * f];
        normal_fill(&mut rng, config.init_std, &mut user_factors);
        normal_fill(&mut rng, config.init_std, &mut item_factors);
        Self {
            config,
            scale,
            global_mean,
            user_bias: vec![T::zero(); users.len()],
            item_bias: vec![T::zero(); items.len()],
            users,
            items,
            user_factors,
            item_factors,
        }
    }

    fn index(&self, ratings: &[Rating<T>]) -> Vec<Indexed<T>> {
        let mut data: Vec<Indexed<T>> = ratings
            .iter()
            .filter_map(|r| {
                Some(Indexed {
                    user: self.user_pos(r.user)?,
                    item: self.item_pos(r.item)?,
                    value: r.value,
                })
            })
            .collect();
        data.sort_by_key(|e| (e.user, e.item));
        data
    }

    fn user_pos(&self, user: UserId) -> Option<usize> {
        self.users.binary_search(&user).ok()
    }

    fn item_pos(&self, item: ItemId) -> Option<usize> {
        self.items.binary_search(&item).ok()
    }

    fn example(&self, u: usize, i: usize) -> Example<'_, T> {
        let f = self.config.factors;
        Example {
            bu: self.user_bias[u],
            bi: self.item_bias[i],
            pu: &self.user_factors[u * f..(u + 1) * f],
            qi: &self.item_factors[i * f..(i + 1) * f],
        }
    }

    fn raw_score(&self, e: &Example<'_, T>) -> T {
        let interaction = dot(e.qi, e.pu);
        if self.config.biased {
            self.global_mean + e.bu + e.bi + interaction
        } else {
            interaction
        }
    }

    /// Gradient of one rating's regularized loss. Writes the factor parts to
    /// `d_p`/`d_q` and returns the bias parts (zero for unbiased models).
    fn example_gradient(
        &self,
        e: &Example<'_, T>,
        rating: T,
        reg: T,
        d_p: &mut [T],
        d_q: &mut [T],
    ) -> (T, T) {
        let err = rating - self.raw_score(e);
        for k in 0..e.pu.len() {
            d_p[k] = -err * e.qi[k] + reg * e.pu[k];
            d_q[k] = -err * e.pu[k] + reg * e.qi[k];
        }
        if self.config.biased {
            (-err + reg * e.bu, -err + reg * e.bi)
        } else {
            (T::zero(), T::zero())
        }
    }

    fn example_loss(&self, e: &Example<'_, T>, rating: T, reg: T) -> T {
        let err = rating - self.raw_score(e);
        let mut penalty = dot(e.pu, e.pu) + dot(e.qi, e.qi);
        if self.config.biased {
            penalty += e.bu * e.bu + e.bi * e.bi;
        }
        T::of(0.5) * (err * err + reg * penalty)
    }

    fn loss_indexed(&self, data: &[Indexed<T>]) -> T {
        let reg = T::of(self.config.regularization);
        data.iter()
            .map(|ex| self.example_loss(&self.example(ex.user, ex.item), ex.value, reg))
            .sum()
    }

    /// Sum of the per-rating regularized losses the SGD steps descend.
    pub fn regularized_loss(&self, ratings: &[Rating<T>]) -> T {
        self.loss_indexed(&self.index(ratings))
    }

    /// Analytic gradient of [`regularized_loss`](Self::regularized_loss),
    /// accumulated from the same per-rating gradients SGD applies.
    pub fn loss_gradient(&self, ratings: &[Rating<T>]) -> SvdGradient<T> {
        let f = self.config.factors;
        let reg = T::of(self.config.regularization);
        let mut g = SvdGradient {
            user_bias: vec![T::zero(); self.users.len()],
            user_factors: vec![T::zero(); self.users.len() * f],
            item_bias: vec![T::zero(); self.items.len()],
            item_factors: vec![T::zero(); self.items.len() * f],
        };
        let mut d_p = vec![T::zero(); f];
        let mut d_q = vec![T::zero(); f];
        for ex in self.index(ratings) {
            let e = self.example(ex.user, ex.item);
            let (d_bu, d_bi) = self.example_gradient(&e, ex.value, reg, &mut d_p, &mut d_q);
            g.user_bias[ex.user] += d_bu;
            g.item_bias[ex.item] += d_bi;
            for k in 0..f {
                g.user_factors[ex.user * f + k] += d_p[k];
                g.item_factors[ex.item * f + k] += d_q[k];
            }
        }
        g
    }

    pub fn param_count(&self, class: ParamClass) -> usize {
        match class {
            ParamClass::UserBias => self.user_bias.len(),
            ParamClass::UserFactor => self.user_factors.len(),
            ParamClass::ItemBias => self.item_bias.len(),
            ParamClass::ItemFactor => self.item_factors.len(),
        }
    }

    /// Copy of the model with one parameter shifted by `delta`.
    pub fn with_parameter_shift(&self, class: ParamClass, index: usize, delta: T) -> Self {
        let mut out = self.clone();
        let slot = match class {
            ParamClass::UserBias => &mut out.user_bias[index],
            ParamClass::UserFactor => &mut out.user_factors[index],
            ParamClass::ItemBias => &mut out.item_bias[index],
            ParamClass::ItemFactor => &mut out.item_factors[index],
        };
        *slot += delta;
        out
    }

    /// Fits user factors and bias to `observed` with item parameters and the
    /// global mean frozen. Factors start from Normal(0, init_std) drawn from
    /// `seed`; ratings are visited in item order for `epochs` passes.
    pub fn fold_in(&self, observed: &Profile<T>, seed: u64) -> FoldedUser<T> {
        let f = self.config.factors;
        let mut known = Vec::with_capacity(observed.len());
        let mut skipped = 0;
        for (item, value) in observed.iter() {
            match self.item_pos(item) {
                Some(pos) => known.push((item, pos, value)),
                None => skipped += 1,
            }
        }
        let mut user = FoldedUser {
            factors: vec![T::zero(); f],
            bias: T::zero(),
            trained_on: known.iter().map(|&(item, _, _)| item).collect(),
            skipped,
        };
        if known.is_empty() {
            return user;
        }
        normal_fill(
            &mut seeding::rng(seed, stream::FOLD_IN, 0),
            self.config.init_std,
            &mut user.factors,
        );
        let lr = T::of(self.config.learning_rate);
        let reg = T::of(self.config.regularization);
        let mut d_p = vec![T::zero(); f];
        let mut d_q = vec![T::zero(); f];
        for _ in 0..self.config.epochs {
            for &(_, pos, value) in &known {
                let e = Example {
                    bu: user.bias,
                    bi: self.item_bias[pos],
                    pu: &user.factors,
                    qi: &self.item_factors[pos * f..(pos + 1) * f],
                };
                let (d_bu, _) = self.example_gradient(&e, value, reg, &mut d_p, &mut d_q);
                if self.config.biased {
                    user.bias -= lr * d_bu;
                }
                for (p, &d) in user.factors.iter_mut().zip(&d_p) {
                    *p -= lr * d;
                }
            }
        }
        user
    }

    /// Rating for a folded user; unknown items fall back to `mu + b_u`.
    /// Results are clamped to the rating scale.
    pub fn predict(&self, user: &FoldedUser<T>, item: ItemId) -> Prediction<T> {
        let f = self.config.factors;
        match self.item_pos(item) {
            Some(pos) => {
                let e = Example {
                    bu: user.bias,
                    bi: self.item_bias[pos],
                    pu: &user.factors,
                    qi: &self.item_factors[pos * f..(pos + 1) * f],
                };
                Prediction::personalized(self.scale.clamp(self.raw_score(&e)))
            }
            None => {
                let base = if self.config.biased {
                    self.global_mean + user.bias
                } else {
                    T::zero()
                };
                Prediction::fallback(self.scale.clamp(base))
            }
        }
    }

    /// Unclamped score for a (user, item) pair seen in training.
    pub fn score_trained(&self, user: UserId, item: ItemId) -> Option<T> {
        let e = self.example(self.user_pos(user)?, self.item_pos(item)?);
        Some(self.raw_score(&e))
    }

    pub fn config(&self) -> &SvdConfig {
        &self.config
    }

    pub fn scale(&self) -> Scale<T> {
        self.scale
    }

    pub fn global_mean(&self) -> T {
        self.global_mean
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn users(&self) -> &[UserId] {
        &self.users
    }

    pub fn item_bias(&self, item: ItemId) -> Option<T> {
        self.item_pos(item).map(|p| self.item_bias[p])
    }

    pub fn user_bias(&self, user: UserId) -> Option<T> {
        self.user_pos(user).map(|p| self.user_bias[p])
    }

    /// FNV-1a digest over every parameter's bit pattern.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.global_mean.as_f64().to_bits());
        for u in &self.users {
            eat(u.0 as u64);
        }
        for i in &self.items {
            eat(i.0 as u64);
        }
        for v in self
            .user_bias
            .iter()
            .chain(&self.user_factors)
            .chain(&self.item_bias)
            .chain(&self.item_factors)
        {
            eat(v.as_f64().to_bits());
        }
        h
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&Snapshot {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: Snapshot<T> = serde_json::from_str(text)?;
        if snap.format != SNAPSHOT_FORMAT || snap.version != SNAPSHOT_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported model snapshot {} v{}",
                snap.format, snap.version
            )));
        }
        snap.model.validated()
    }

    /// Assembles a model from explicit parameters. Factor vectors are
    /// row-major, `factors` entries per user or item; ids must be sorted.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        config: SvdConfig,
        scale: Scale<T>,
        global_mean: T,
        users: Vec<UserId>,
        user_bias: Vec<T>,
        user_factors: Vec<T>,
        items: Vec<ItemId>,
        item_bias: Vec<T>,
        item_factors: Vec<T>,
    ) -> Result<Self> {
        Self {
            config,
            scale,
            global_mean,
            users,
            user_bias,
            user_factors,
            items,
            item_bias,
            item_factors,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        self.config.validate()?;
        let f = self.config.factors;
        let sorted = |ids: &[u32]| ids.windows(2).all(|w| w[0] < w[1]);
        let user_ids: Vec<u32> = self.users.iter().map(|u| u.0).collect();
        let item_ids: Vec<u32> = self.items.iter().map(|i| i.0).collect();
        if self.user_bias.len() != self.users.len()
            || self.user_factors.len() != self.users.len() * f
            || self.item_bias.len() != self.items.len()
            || self.item_factors.len() != self.items.len() * f
            || !sorted(&user_ids)
            || !sorted(&item_ids)
        {
            return Err(Error::InvalidParameter(
                "svd parameters have inconsistent lengths or unsorted ids".into(),
            ));
        }
        Ok(self)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(u: u32, i: u32, v: f64) -> Rating<f64> {
        Rating {
            user: UserId(u),
            item: ItemId(i),
            value: v,
            timestamp: 0,
        }
    }

    fn toy() -> Vec<Rating<f64>> {
        vec![
            r(0, 0, 5.0),
            r(0, 1, 3.0),
            r(1, 0, 4.0),
            r(1, 2, 1.0),
            r(2, 1, 2.0),
            r(2, 2, 4.5),
        ]
    }

    #[test]
    fn single_rating_is_learned() {
        let cfg = SvdConfig {
            epochs: 500,
            ..Default::default()
        };
        let m = SvdModel::train(&[r(0, 0, 4.0)], Scale::movielens(), cfg).unwrap();
        let p = m.score_trained(UserId(0), ItemId(0)).unwrap();
        assert!((p - 4.0).abs() < 0.05);
    }

    #[test]
    fn invalid_configs_rejected() {
        let data = toy();
        for cfg in [
            SvdConfig {
                factors: 0,
                ..Default::default()
            },
            SvdConfig {
                epochs: 0,
                ..Default::default()
            },
            SvdConfig {
                learning_rate: 0.0,
                ..Default::default()
            },
            SvdConfig {
                regularization: -1.0,
                ..Default::default()
            },
        ] {
            assert!(SvdModel::train(&data, Scale::movielens(), cfg).is_err());
        }
        assert!(SvdModel::<f64>::train(&[], Scale::movielens(), SvdConfig::default()).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let a = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        let b = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = SvdModel::train(
            &toy(),
            Scale::movielens(),
            SvdConfig {
                seed: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn global_mean_matches_data() {
        let m = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        assert!((m.global_mean() - 19.5 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_fold_in_predicts_mean_plus_item_bias() {
        let m = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        let user = m.fold_in(&Profile::new(), 3);
        assert!(user.factors.iter().all(|&x| x == 0.0));
        assert_eq!(user.bias, 0.0);
        for item in [ItemId(0), ItemId(1), ItemId(2)] {
            let expect = m.global_mean() + m.item_bias(item).unwrap();
            assert!((m.predict(&user, item).value - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn fold_in_bias_sign_and_determinism() {
        let m = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        let observed: Profile<f64> = [(ItemId(2), 5.0), (ItemId(77), 1.0)].into_iter().collect();
        let folded = m.fold_in(&observed, 11);
        assert!(folded.bias > 0.0);
        assert_eq!(folded.skipped, 1);
        assert_eq!(folded.trained_on, vec![ItemId(2)]);
        assert_eq!(folded, m.fold_in(&observed, 11));
    }

    #[test]
    fn unknown_item_falls_back() {
        let m = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        let user = FoldedUser {
            factors: vec![0.0; 30],
            bias: 0.25,
            trained_on: vec![],
            skipped: 0,
        };
        let p = m.predict(&user, ItemId(40));
        assert!(!p.personalized);
        assert!((p.value - (m.global_mean() + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn prediction_formula() {
        let cfg = SvdConfig {
            factors: 1,
            ..Default::default()
        };
        let zero = SvdModel::from_parts(
            cfg,
            Scale::movielens(),
            3.5,
            vec![UserId(0)],
            vec![0.0],
            vec![0.0],
            vec![ItemId(0)],
            vec![0.0],
            vec![0.0],
        )
        .unwrap();
        let user = FoldedUser {
            factors: vec![0.0],
            bias: 0.0,
            trained_on: vec![],
            skipped: 0,
        };
        assert_eq!(zero.predict(&user, ItemId(0)).value, 3.5);

        let m: SvdModel<f64> = SvdModel::from_parts(
            cfg,
            Scale::movielens(),
            3.5,
            vec![UserId(0)],
            vec![0.0],
            vec![0.0],
            vec![ItemId(0)],
            vec![-0.1],
            vec![0.5],
        )
        .unwrap();
        let user = FoldedUser {
            factors: vec![0.6],
            bias: 0.2,
            trained_on: vec![],
            skipped: 0,
        };
        assert!((m.predict(&user, ItemId(0)).value - 3.9).abs() < 1e-12);

        let unbiased = SvdModel::from_parts(
            SvdConfig {
                biased: false,
                ..cfg
            },
            Scale::movielens(),
            3.5,
            vec![UserId(0)],
            vec![0.0],
            vec![0.0],
            vec![ItemId(0)],
            vec![0.0],
            vec![0.5],
        )
        .unwrap();
        // q.p = 0.3 lies below the scale minimum of 0.5
        assert_eq!(unbiased.predict(&user, ItemId(0)).value, 0.5);
        assert!(SvdModel::from_parts(
            cfg,
            Scale::movielens(),
            3.5,
            vec![UserId(0)],
            vec![0.0],
            vec![0.0, 1.0],
            vec![ItemId(0)],
            vec![0.0],
            vec![0.5],
        )
        .is_err());
    }

    #[test]
    fn unbiased_prediction_is_clamped() {
        let cfg = SvdConfig {
            biased: false,
            factors: 2,
            ..Default::default()
        };
        let m = SvdModel::train(&toy(), Scale::movielens(), cfg).unwrap();
        let user = m.fold_in(&Profile::new(), 0);
        // zero factors give a raw score of 0, below the scale minimum
        assert_eq!(m.predict(&user, ItemId(0)).value, 0.5);
    }

    #[test]
    fn snapshot_reload_is_bit_exact() {
        let m = SvdModel::train(&toy(), Scale::movielens(), SvdConfig::default()).unwrap();
        let text = m.to_json().unwrap();
        let back = SvdModel::<f64>::from_json(&text).unwrap();
        assert_eq!(m, back);
        let obs: Profile<f64> = [(ItemId(0), 4.0)].into_iter().collect();
        let (ua, ub) = (m.fold_in(&obs, 5), back.fold_in(&obs, 5));
        for i in 0..3 {
            assert_eq!(
                m.predict(&ua, ItemId(i)).value.to_bits(),
                back.predict(&ub, ItemId(i)).value.to_bits()
            );
        }
        let tampered = text.replace("\"version\":1", "\"version\":9");
        assert!(SvdModel::<f64>::from_json(&tampered).is_err());
    }
}
