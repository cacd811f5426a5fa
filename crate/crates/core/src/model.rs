//! Domain types shared by the engine, the predictor, the generator and the
//! baselines.
//!
//! Ratings are stored as level indices into a [`RatingScale`]; the numeric
//! rating value is only looked up when computing errors or baselines.

use std::collections::HashSet;

use ndarray::{Array2, Array3, ArrayView1};

use crate::error::{Bm2Error, Result};

/// Ordered set of admissible rating values `C_1 < C_2 < ... < C_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingScale {
    values: Vec<f64>,
}

impl RatingScale {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Bm2Error::InvalidScale(format!(
                "need at least two levels, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Bm2Error::InvalidScale("non-finite level".into()));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Bm2Error::InvalidScale(format!("levels not strictly increasing: {values:?}")));
        }
        Ok(Self { values })
    }

    /// `1, 2, ..., levels`.
    pub fn integer(levels: usize) -> Result<Self> {
        Self::new((1..=levels).map(|v| v as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, level: usize) -> f64 {
        self.values[level]
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Level index of an exact rating value.
    pub fn level_of(&self, value: f64) -> Option<usize> {
        self.values.iter().position(|&v| v == value)
    }

    /// Level whose value is closest to `value`; ties go to the lower level.
    pub fn nearest_level(&self, value: f64) -> usize {
        let mut best = 0;
        let mut best_gap = f64::INFINITY;
        for (s, &v) in self.values.iter().enumerate() {
            let gap = (v - value).abs();
            if gap < best_gap {
                best = s;
                best_gap = gap;
            }
        }
        best
    }

    pub fn clip(&self, value: f64) -> f64 {
        value.clamp(self.min(), self.max())
    }
}

/// One observed rating: `user` gave `item` the value at `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rating {
    pub user: usize,
    pub item: usize,
    pub level: usize,
}

impl Rating {
    pub fn new(user: usize, item: usize, level: usize) -> Self {
        Self { user, item, level }
    }
}

/// Sparse triplet store over `n_users x n_items`, at most one rating per
/// (user, item) pair. Per-user and per-item adjacency lists hold indices
/// into [`RatingDataset::ratings`].
#[derive(Debug, Clone)]
pub struct RatingDataset {
    n_users: usize,
    n_items: usize,
    scale: RatingScale,
    ratings: Vec<Rating>,
    by_user: Vec<Vec<usize>>,
    by_item: Vec<Vec<usize>>,
}

impl RatingDataset {
    pub fn new(n_users: usize, n_items: usize, scale: RatingScale, ratings: Vec<Rating>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(ratings.len());
        let mut by_user = vec![Vec::new(); n_users];
        let mut by_item = vec![Vec::new(); n_items];
        for (idx, r) in ratings.iter().enumerate() {
            if r.user >= n_users || r.item >= n_items || r.level >= scale.len() {
                return Err(Bm2Error::InvalidDataset(format!(
                    "rating {idx} ({}, {}, level {}) outside {n_users} x {n_items} x {}",
                    r.user,
                    r.item,
                    r.level,
                    scale.len()
                )));
            }
            if !seen.insert((r.user, r.item)) {
                return Err(Bm2Error::InvalidDataset(format!(
                    "duplicate rating for user {} item {}",
                    r.user, r.item
                )));
            }
            by_user[r.user].push(idx);
            by_item[r.item].push(idx);
        }
        Ok(Self { n_users, n_items, scale, ratings, by_user, by_item })
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn scale(&self) -> &RatingScale {
        &self.scale
    }

    pub fn levels(&self) -> usize {
        self.scale.len()
    }

    pub fn ratings(&self) -> &[Rating] {
        &self.ratings
    }

    pub fn len(&self) -> usize {
        self.ratings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    /// Indices of the ratings given by `user` (the set U_i).
    pub fn user_ratings(&self, user: usize) -> &[usize] {
        &self.by_user[user]
    }

    /// Indices of the ratings received by `item` (the users in I_j).
    pub fn item_ratings(&self, item: usize) -> &[usize] {
        &self.by_item[item]
    }

    pub fn value_of(&self, rating: &Rating) -> f64 {
        self.scale.value(rating.level)
    }

    pub fn global_mean(&self) -> f64 {
        if self.ratings.is_empty() {
            return 0.5 * (self.scale.min() + self.scale.max());
        }
        self.ratings.iter().map(|r| self.value_of(r)).sum::<f64>() / self.ratings.len() as f64
    }

    /// Empirical frequency of each level.
    pub fn level_histogram(&self) -> Vec<f64> {
        let mut counts = vec![0.0; self.levels()];
        for r in &self.ratings {
            counts[r.level] += 1.0;
        }
        let total = self.ratings.len().max(1) as f64;
        counts.iter_mut().for_each(|c| *c /= total);
        counts
    }

    /// A dataset over the same users, items and scale holding the ratings
    /// at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let ratings = indices.iter().map(|&i| self.ratings[i]).collect();
        Self::new(self.n_users, self.n_items, self.scale.clone(), ratings)
            .expect("subset of a valid dataset is valid")
    }
}

/// Cluster counts, Dirichlet hyperparameters and convergence controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub k: usize,
    pub l: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
}

impl ModelConfig {
    pub const DEFAULT_MAX_ITERS: usize = 500;
    pub const DEFAULT_REL_TOL: f64 = 1e-6;

    /// Non-informative prior: every α_k = 1/K and every β_l = 1/L.
    pub fn new(k: usize, l: usize) -> Self {
        Self {
            k,
            l,
            alpha: vec![1.0 / k.max(1) as f64; k],
            beta: vec![1.0 / l.max(1) as f64; l],
            max_iters: Self::DEFAULT_MAX_ITERS,
            rel_tol: Self::DEFAULT_REL_TOL,
            seed: 0,
        }
    }

    pub fn with_prior(alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        Self { k: alpha.len(), l: beta.len(), alpha, beta, ..Self::new(1, 1) }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.l == 0 {
            return Err(Bm2Error::InvalidConfig(format!("K={} and L={} must be at least 1", self.k, self.l)));
        }
        if self.alpha.len() != self.k || self.beta.len() != self.l {
            return Err(Bm2Error::InvalidConfig(format!(
                "alpha has {} entries for K={}, beta has {} entries for L={}",
                self.alpha.len(),
                self.k,
                self.beta.len(),
                self.l
            )));
        }
        if self.alpha.iter().chain(&self.beta).any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Bm2Error::InvalidConfig("hyperparameters must be positive and finite".into()));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Bm2Error::InvalidConfig(format!("rel_tol {} must be nonnegative", self.rel_tol)));
        }
        Ok(())
    }
}

/// Block-level rating distributions μ, shape `K x L x S`. Every `(k, l)`
/// fibre is a probability vector over the rating levels.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockArray {
    mu: Array3<f64>,
}

impl BlockArray {
    pub const SUM_TOL: f64 = 1e-10;

    pub fn new(mu: Array3<f64>) -> Result<Self> {
        let (k, l, s) = mu.dim();
        if k == 0 || l == 0 || s < 2 {
            return Err(Bm2Error::InvalidBlockArray(format!("bad shape {k} x {l} x {s}")));
        }
        for a in 0..k {
            for b in 0..l {
                let row = mu.slice(ndarray::s![a, b, ..]);
                if row.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
                    return Err(Bm2Error::InvalidBlockArray(format!("block ({a}, {b}) has a negative or non-finite entry")));
                }
                let total: f64 = row.sum();
                if (total - 1.0).abs() > Self::SUM_TOL {
                    return Err(Bm2Error::InvalidBlockArray(format!("block ({a}, {b}) sums to {total}")));
                }
            }
        }
        Ok(Self { mu })
    }

    /// Rescales every `(k, l)` fibre of nonnegative weights to sum to one.
    pub fn from_weights(mut weights: Array3<f64>) -> Result<Self> {
        let (k, l, _) = weights.dim();
        for a in 0..k {
            for b in 0..l {
                let mut row = weights.slice_mut(ndarray::s![a, b, ..]);
                let total: f64 = row.sum();
                if !(total > 0.0) || !total.is_finite() {
                    return Err(Bm2Error::InvalidBlockArray(format!("block ({a}, {b}) has no positive mass")));
                }
                row.mapv_inplace(|p| p / total);
            }
        }
        Self::new(weights)
    }

    pub fn uniform(k: usize, l: usize, s: usize) -> Self {
        Self { mu: Array3::from_elem((k, l, s), 1.0 / s as f64) }
    }

    pub fn k(&self) -> usize {
        self.mu.dim().0
    }

    pub fn l(&self) -> usize {
        self.mu.dim().1
    }

    pub fn levels(&self) -> usize {
        self.mu.dim().2
    }

    pub fn get(&self, k: usize, l: usize, s: usize) -> f64 {
        self.mu[[k, l, s]]
    }

    pub fn block(&self, k: usize, l: usize) -> ArrayView1<'_, f64> {
        self.mu.slice(ndarray::s![k, l, ..])
    }

    pub fn as_array(&self) -> &Array3<f64> {
        &self.mu
    }

    pub(crate) fn from_array_unchecked(mu: Array3<f64>) -> Self {
        Self { mu }
    }
}

/// Free variational parameters: Dirichlet parameters per user (`gamma_u`,
/// `N x K`) and per item (`gamma_i`, `M x L`), and per observed rating a
/// user-side responsibility (`phi_u`, `R x K`) and an item-side
/// responsibility (`phi_i`, `R x L`). Row `r` of the φ arrays belongs to
/// rating `r` of the dataset the state was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalState {
    pub gamma_u: Array2<f64>,
    pub gamma_i: Array2<f64>,
    pub phi_u: Array2<f64>,
    pub phi_i: Array2<f64>,
}

/// Converged (or iteration-capped) output of the variational EM loop.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub state: VariationalState,
    pub mu: BlockArray,
    /// ELBO of the initial state followed by one value per checked iteration.
    pub elbo_trace: Vec<f64>,
    pub n_iters: usize,
    pub converged: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_rejects_single_level_and_disorder() {
        assert!(RatingScale::new(vec![1.0]).is_err());
        assert!(RatingScale::new(vec![1.0, 1.0]).is_err());
        assert!(RatingScale::new(vec![2.0, 1.0]).is_err());
        let scale = RatingScale::new(vec![1.0, 2.5, 4.0]).unwrap();
        assert_eq!(scale.level_of(2.5), Some(1));
        assert_eq!(scale.nearest_level(3.25), 1);
        assert_eq!(scale.nearest_level(3.26), 2);
    }

    #[test]
    fn dataset_validates_indices_and_duplicates() {
        let scale = RatingScale::integer(5).unwrap();
        assert!(RatingDataset::new(2, 2, scale.clone(), vec![Rating::new(2, 0, 0)]).is_err());
        assert!(RatingDataset::new(2, 2, scale.clone(), vec![Rating::new(0, 0, 5)]).is_err());
        let dup = vec![Rating::new(0, 1, 0), Rating::new(0, 1, 3)];
        assert!(RatingDataset::new(2, 2, scale.clone(), dup).is_err());

        let data = RatingDataset::new(
            3,
            2,
            scale,
            vec![Rating::new(0, 0, 2), Rating::new(0, 1, 4), Rating::new(2, 1, 0)],
        )
        .unwrap();
        assert_eq!(data.user_ratings(0), &[0, 1]);
        assert!(data.user_ratings(1).is_empty());
        // I_j holds the users who rated item j.
        let raters: Vec<usize> = data.item_ratings(1).iter().map(|&r| data.ratings()[r].user).collect();
        assert_eq!(raters, vec![0, 2]);
        assert_eq!(data.global_mean(), (3.0 + 5.0 + 1.0) / 3.0);
    }

    #[test]
    fn config_validation() {
        assert!(ModelConfig::new(1, 1).validate().is_ok());
        assert!(ModelConfig::new(0, 2).validate().is_err());
        let mut cfg = ModelConfig::new(2, 2);
        cfg.alpha[1] = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = ModelConfig::with_prior(vec![0.1, 0.2, 0.7], vec![1.0]);
        assert_eq!((cfg.k, cfg.l), (3, 1));
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn block_array_rows_must_be_distributions() {
        let mut mu = Array3::from_elem((2, 1, 2), 0.5);
        assert!(BlockArray::new(mu.clone()).is_ok());
        mu[[1, 0, 0]] = 0.6;
        assert!(BlockArray::new(mu.clone()).is_err());
        let normalized = BlockArray::from_weights(mu).unwrap();
        assert!((normalized.get(1, 0, 0) - 0.6 / 1.1).abs() < 1e-15);
        assert!(BlockArray::new(Array3::from_elem((1, 1, 1), 1.0)).is_err());
    }
}
