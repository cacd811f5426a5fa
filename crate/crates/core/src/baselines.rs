//! Comparison predictors: per-user mean, cosine neighbourhood methods over
//! users or items, and probabilistic matrix factorisation.
//!
//! All of them return real-valued predictions clipped to the rating scale;
//! [`round_to_scale`] snaps them to the nearest level when an exact-match
//! rate is wanted.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Bm2Error, Result};
use crate::model::{RatingDataset, RatingScale};

fn check(what: &'static str, index: usize, size: usize) -> Result<()> {
    if index < size {
        Ok(())
    } else {
        Err(Bm2Error::IndexOutOfRange { what, index, size })
    }
}

/// Per-user mean of the observed rating values.
#[derive(Debug, Clone)]
pub struct NaiveModel {
    user_mean: Vec<Option<f64>>,
    global_mean: f64,
}

impl NaiveModel {
    pub fn fit(train: &RatingDataset) -> Self {
        let user_mean = (0..train.n_users())
            .map(|u| {
                let idx = train.user_ratings(u);
                (!idx.is_empty())
                    .then(|| idx.iter().map(|&t| train.value_of(&train.ratings()[t])).sum::<f64>() / idx.len() as f64)
            })
            .collect();
        NaiveModel { user_mean, global_mean: train.global_mean() }
    }

    pub fn global_mean(&self) -> f64 {
        self.global_mean
    }

    /// The user's mean rating, or the global mean for a user without ratings.
    pub fn predict(&self, user: usize, _item: usize) -> Result<f64> {
        check("user", user, self.user_mean.len())?;
        Ok(self.user_mean[user].unwrap_or(self.global_mean))
    }
}

pub fn naive_predict(train: &RatingDataset, user: usize, item: usize) -> Result<f64> {
    check("item", item, train.n_items())?;
    NaiveModel::fit(train).predict(user, item)
}

/// Cosine similarity of two sparse vectors given as `(index, value)` pairs
/// sorted by index, computed over the co-rated indices only. Returns 0 when
/// fewer than `min_overlap` indices are shared or either restricted norm is 0.
pub fn cosine_similarity(a: &[(usize, f64)], b: &[(usize, f64)], min_overlap: usize) -> f64 {
    let (mut p, mut q) = (0, 0);
    let (mut dot, mut na, mut nb, mut shared) = (0.0, 0.0, 0.0, 0usize);
    while p < a.len() && q < b.len() {
        match a[p].0.cmp(&b[q].0) {
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
            std::cmp::Ordering::Equal => {
                let (x, y) = (a[p].1, b[q].1);
                dot += x * y;
                na += x * x;
                nb += y * y;
                shared += 1;
                p += 1;
                q += 1;
            }
        }
    }
    if shared == 0 || shared < min_overlap || na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fallback {
    /// The target user's mean rating (global mean for unseen users).
    UserMean,
    GlobalMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborConfig {
    /// Keep only the most similar neighbours; `None` uses every qualifying one.
    pub k_neighbors: Option<usize>,
    pub min_overlap: usize,
    pub fallback: Fallback,
}

impl Default for NeighborConfig {
    fn default() -> Self {
        NeighborConfig { k_neighbors: None, min_overlap: 1, fallback: Fallback::UserMean }
    }
}

impl NeighborConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == Some(0) {
            return Err(Bm2Error::InvalidConfig("k_neighbors must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Neighbours are users who rated the target item.
    UserBased,
    /// Neighbours are items the target user rated.
    ItemBased,
}

/// Memory-based collaborative filtering with a precomputed cosine similarity
/// matrix. A neighbour qualifies when its similarity is positive and it has a
/// rating for the target; the prediction is `Σ sim·r / Σ |sim|` over the
/// retained neighbours.
#[derive(Debug, Clone)]
pub struct NeighborModel {
    orientation: Orientation,
    config: NeighborConfig,
    // Entities being compared (users for user-based), each a sorted sparse vector.
    rows: Vec<Vec<(usize, f64)>>,
    // For every column, the rows that rated it.
    cols: Vec<Vec<(usize, f64)>>,
    sim: Array2<f64>,
    naive: NaiveModel,
    scale: RatingScale,
}

impl NeighborModel {
    pub fn fit(train: &RatingDataset, orientation: Orientation, config: NeighborConfig) -> Result<Self> {
        config.validate()?;
        let (n_rows, n_cols) = match orientation {
            Orientation::UserBased => (train.n_users(), train.n_items()),
            Orientation::ItemBased => (train.n_items(), train.n_users()),
        };
        let mut rows = vec![Vec::new(); n_rows];
        let mut cols = vec![Vec::new(); n_cols];
        for r in train.ratings() {
            let (row, col) = match orientation {
                Orientation::UserBased => (r.user, r.item),
                Orientation::ItemBased => (r.item, r.user),
            };
            let v = train.value_of(r);
            rows[row].push((col, v));
            cols[col].push((row, v));
        }
        for list in rows.iter_mut().chain(cols.iter_mut()) {
            list.sort_unstable_by_key(|e| e.0);
        }

        let mut sim = Array2::zeros((n_rows, n_rows));
        let flat = sim.as_slice_mut().expect("fresh arrays are contiguous");
        flat.par_chunks_mut(n_rows.max(1)).enumerate().for_each(|(a, out)| {
            for (b, slot) in out.iter_mut().enumerate() {
                if a != b {
                    *slot = cosine_similarity(&rows[a], &rows[b], config.min_overlap);
                }
            }
        });
        Ok(NeighborModel {
            orientation,
            config,
            rows,
            cols,
            sim,
            naive: NaiveModel::fit(train),
            scale: train.scale().clone(),
        })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Similarity between two users (user-based) or two items (item-based).
    pub fn similarity(&self, a: usize, b: usize) -> f64 {
        self.sim[[a, b]]
    }

    fn fallback(&self, user: usize) -> Result<f64> {
        match self.config.fallback {
            Fallback::UserMean => self.naive.predict(user, 0),
            Fallback::GlobalMean => Ok(self.naive.global_mean()),
        }
    }

    pub fn predict(&self, user: usize, item: usize) -> Result<f64> {
        let (row, col) = match self.orientation {
            Orientation::UserBased => (user, item),
            Orientation::ItemBased => (item, user),
        };
        let (row_what, col_what) = match self.orientation {
            Orientation::UserBased => ("user", "item"),
            Orientation::ItemBased => ("item", "user"),
        };
        check(row_what, row, self.rows.len())?;
        check(col_what, col, self.cols.len())?;

        let mut neighbours: Vec<(f64, usize, f64)> = self.cols[col]
            .iter()
            .filter(|&&(other, _)| other != row)
            .map(|&(other, v)| (self.sim[[row, other]], other, v))
            .filter(|&(s, _, _)| s > 0.0)
            .collect();
        if neighbours.is_empty() {
            return self.fallback(user);
        }
        if let Some(k) = self.config.k_neighbors {
            neighbours.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
            neighbours.truncate(k);
        }
        let (num, den) = neighbours.iter().fold((0.0, 0.0), |(n, d), &(s, _, v)| (n + s * v, d + s.abs()));
        Ok(self.scale.clip(num / den))
    }
}

pub fn user_based_predict(train: &RatingDataset, user: usize, item: usize, cfg: NeighborConfig) -> Result<f64> {
    NeighborModel::fit(train, Orientation::UserBased, cfg)?.predict(user, item)
}

pub fn item_based_predict(train: &RatingDataset, user: usize, item: usize, cfg: NeighborConfig) -> Result<f64> {
    NeighborModel::fit(train, Orientation::ItemBased, cfg)?.predict(user, item)
}

/// How the L2 penalty enters the PMF objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularization {
    /// `λ (‖U‖² + ‖V‖²)`: every factor row is penalised once.
    PerFactor,
    /// `λ Σ_(i,j) (‖u_i‖² + ‖v_j‖²)`: the penalty is repeated for every
    /// rating a row takes part in, as in the usual stochastic-gradient recipe.
    PerRating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfConfig {
    pub rank: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub penalty: Regularization,
    pub max_epochs: usize,
    /// Stop once the relative objective decrease over an epoch falls below this.
    pub tol: f64,
    /// Standard deviation of the Gaussian noise added to the initial factors.
    pub init_noise: f64,
    pub seed: u64,
}

impl Default for PmfConfig {
    fn default() -> Self {
        PmfConfig {
            rank: 10,
            learning_rate: 0.005,
            regularization: 0.05,
            penalty: Regularization::PerFactor,
            max_epochs: 200,
            tol: 1e-9,
            init_noise: 0.1,
            seed: 0,
        }
    }
}

impl PmfConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Bm2Error::InvalidConfig(m.into()));
        if self.rank == 0 {
            return bad("PMF rank must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("PMF learning_rate must be positive");
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return bad("PMF regularization must be nonnegative");
        }
        if !(self.tol >= 0.0) || !(self.init_noise >= 0.0) {
            return bad("PMF tol and init_noise must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PmfModel {
    pub user_factors: Array2<f64>,
    pub item_factors: Array2<f64>,
    /// Objective after initialisation and after every epoch.
    pub objective_trace: Vec<f64>,
    pub epochs: usize,
    scale: RatingScale,
}

impl PmfModel {
    /// `u_i · v_j` clipped to the rating range.
    pub fn predict(&self, user: usize, item: usize) -> Result<f64> {
        check("user", user, self.user_factors.nrows())?;
        check("item", item, self.item_factors.nrows())?;
        Ok(self.scale.clip(self.user_factors.row(user).dot(&self.item_factors.row(item))))
    }
}

pub fn pmf_predict(model: &PmfModel, user: usize, item: usize) -> Result<f64> {
    model.predict(user, item)
}

fn pmf_objective(train: &RatingDataset, u: &Array2<f64>, v: &Array2<f64>, cfg: &PmfConfig) -> f64 {
    let mut loss = 0.0;
    for r in train.ratings() {
        let e = train.value_of(r) - u.row(r.user).dot(&v.row(r.item));
        loss += e * e;
    }
    let row_norm = |m: &Array2<f64>, idx: usize| m.row(idx).dot(&m.row(idx));
    let penalty = match cfg.penalty {
        Regularization::PerFactor => u.iter().map(|x| x * x).sum::<f64>() + v.iter().map(|x| x * x).sum::<f64>(),
        Regularization::PerRating => train.ratings().iter().map(|r| row_norm(u, r.user) + row_norm(v, r.item)).sum(),
    };
    loss + cfg.regularization * penalty
}

/// Fit `R ≈ U Vᵀ` by stochastic coordinate steps: each epoch visits the
/// training ratings in a fresh random order and moves the two factor rows
/// involved along the negative gradient of that rating's share of the
/// objective (the penalty on a row is split evenly over its ratings under
/// [`Regularization::PerFactor`]).
///
/// Factors start at `sqrt(mean / rank)` plus Gaussian noise, so the initial
/// predictions sit near the global mean.
pub fn pmf_fit(train: &RatingDataset, cfg: &PmfConfig) -> Result<PmfModel> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Bm2Error::InvalidDataset("cannot fit PMF to an empty dataset".into()));
    }
    const MAX_INCREASES: usize = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base = (train.global_mean().max(0.0) / cfg.rank as f64).sqrt();
    let noise = Normal::new(0.0, cfg.init_noise).map_err(|e| Bm2Error::InvalidConfig(e.to_string()))?;
    let mut u = Array2::from_shape_simple_fn((train.n_users(), cfg.rank), || base + noise.sample(&mut rng));
    let mut v = Array2::from_shape_simple_fn((train.n_items(), cfg.rank), || base + noise.sample(&mut rng));

    let shrink = |count: usize| match cfg.penalty {
        Regularization::PerFactor => cfg.regularization / count.max(1) as f64,
        Regularization::PerRating => cfg.regularization,
    };
    let user_shrink: Vec<f64> = (0..train.n_users()).map(|i| shrink(train.user_ratings(i).len())).collect();
    let item_shrink: Vec<f64> = (0..train.n_items()).map(|j| shrink(train.item_ratings(j).len())).collect();

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut trace = vec![pmf_objective(train, &u, &v, cfg)];
    let mut increases = 0;
    let lr = cfg.learning_rate;
    let mut ui_old = vec![0.0; cfg.rank];
    let mut epochs = 0;
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for &t in &order {
            let r = train.ratings()[t];
            let (i, j) = (r.user, r.item);
            let e = train.value_of(&r) - u.row(i).dot(&v.row(j));
            let (ls, rs) = (user_shrink[i], item_shrink[j]);
            for (d, old) in ui_old.iter_mut().enumerate() {
                *old = u[[i, d]];
                u[[i, d]] += lr * (e * v[[j, d]] - ls * u[[i, d]]);
            }
            for (d, &old) in ui_old.iter().enumerate() {
                v[[j, d]] += lr * (e * old - rs * v[[j, d]]);
            }
        }
        epochs = epoch;
        let obj = pmf_objective(train, &u, &v, cfg);
        if !obj.is_finite() {
            return Err(Bm2Error::PmfDiverged { epochs: increases + 1, last_epoch: epoch });
        }
        let prev = *trace.last().expect("trace starts non-empty");
        trace.push(obj);
        if obj > prev {
            increases += 1;
            if increases >= MAX_INCREASES {
                return Err(Bm2Error::PmfDiverged { epochs: increases, last_epoch: epoch });
            }
            continue;
        }
        increases = 0;
        if (prev - obj) <= cfg.tol * prev.abs() {
            break;
        }
    }
    log::debug!("PMF stopped after {epochs} epochs, objective {:.6e}", trace.last().copied().unwrap_or(f64::NAN));
    Ok(PmfModel { user_factors: u, item_factors: v, objective_trace: trace, epochs, scale: train.scale().clone() })
}

/// Snap real-valued predictions to the nearest rating value (ties to the
/// lower value).
pub fn round_to_scale(predictions: &mut [(usize, usize, f64)], scale: &RatingScale) {
    for p in predictions {
        p.2 = scale.value(scale.nearest_level(p.2));
    }
}

/// The baselines that can be run over a whole target set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Naive,
    UserBased,
    ItemBased,
    Pmf,
}

impl Baseline {
    pub const ALL: [Baseline; 4] = [Baseline::Naive, Baseline::ItemBased, Baseline::UserBased, Baseline::Pmf];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Naive => "naive",
            Baseline::UserBased => "user-based",
            Baseline::ItemBased => "item-based",
            Baseline::Pmf => "pmf",
        }
    }
}

/// Fit `method` on `train` and predict every rating of `targets`.
pub fn predict_baseline(
    method: Baseline,
    train: &RatingDataset,
    targets: &RatingDataset,
    neighbor: NeighborConfig,
    pmf: &PmfConfig,
) -> Result<Vec<(usize, usize, f64)>> {
    let keys = targets.ratings().iter().map(|r| (r.user, r.item));
    let collect = |f: &(dyn Fn(usize, usize) -> Result<f64> + Sync)| -> Result<Vec<(usize, usize, f64)>> {
        keys.clone().collect::<Vec<_>>().into_par_iter().map(|(i, j)| Ok((i, j, f(i, j)?))).collect()
    };
    match method {
        Baseline::Naive => {
            let m = NaiveModel::fit(train);
            collect(&|i, j| m.predict(i, j))
        }
        Baseline::UserBased | Baseline::ItemBased => {
            let orientation = if method == Baseline::UserBased { Orientation::UserBased } else { Orientation::ItemBased };
            let m = NeighborModel::fit(train, orientation, neighbor)?;
            collect(&|i, j| m.predict(i, j))
        }
        Baseline::Pmf => {
            let m = pmf_fit(train, pmf)?;
            collect(&|i, j| m.predict(i, j))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Rating;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dataset(n: usize, m: usize, triples: &[(usize, usize, usize)]) -> RatingDataset {
        let ratings = triples.iter().map(|&(i, j, s)| Rating::new(i, j, s)).collect();
        RatingDataset::new(n, m, RatingScale::integer(5).unwrap(), ratings).unwrap()
    }

    fn dense(v: &[f64]) -> Vec<(usize, f64)> {
        v.iter().enumerate().filter(|(_, &x)| x != 0.0).map(|(i, &x)| (i, x)).collect()
    }

    #[test]
    fn naive_examples() {
        // levels 2 and 4 are the values 3 and 5
        let data = dataset(3, 3, &[(0, 0, 2), (0, 1, 4), (1, 2, 0)]);
        assert_eq!(naive_predict(&data, 0, 2).unwrap(), 4.0);
        assert_abs_diff_eq!(naive_predict(&data, 2, 0).unwrap(), 3.0, epsilon = 1e-12);
        assert!(naive_predict(&data, 3, 0).is_err());
    }

    #[test]
    fn cosine_examples() {
        let a = dense(&[5.0, 0.0, 3.0]);
        let b = dense(&[4.0, 2.0, 0.0]);
        assert_abs_diff_eq!(cosine_similarity(&a, &a, 1), 1.0, epsilon = 1e-15);
        assert_eq!(cosine_similarity(&dense(&[1.0, 0.0]), &dense(&[0.0, 2.0]), 1), 0.0);
        assert_abs_diff_eq!(cosine_similarity(&a, &b, 1), 1.0, epsilon = 1e-15);
        assert_eq!(cosine_similarity(&a, &b, 2), 0.0);
        let c = dense(&[1.0, 2.0, 3.0]);
        let d = dense(&[3.0, 2.0, 1.0]);
        assert_abs_diff_eq!(cosine_similarity(&c, &d, 1), 10.0 / 14.0, epsilon = 1e-15);
    }

    #[test]
    fn single_neighbour() {
        // users 0 and 1 agree on item 0; user 1 rated item 1 as 4
        let data = dataset(2, 2, &[(0, 0, 2), (1, 0, 2), (1, 1, 3)]);
        assert_eq!(user_based_predict(&data, 0, 1, NeighborConfig::default()).unwrap(), 4.0);
    }

    #[test]
    fn fallbacks() {
        // no one else rated item 1
        let data = dataset(3, 2, &[(0, 0, 0), (0, 1, 4), (1, 0, 4)]);
        let cfg = NeighborConfig::default();
        let user_mean = user_based_predict(&data, 0, 1, cfg).unwrap();
        assert_eq!(user_mean, 3.0);
        let global = user_based_predict(&data, 0, 1, NeighborConfig { fallback: Fallback::GlobalMean, ..cfg }).unwrap();
        assert_abs_diff_eq!(global, 11.0 / 3.0, epsilon = 1e-12);
        // user 2 has no ratings at all and falls back to the global mean
        assert_abs_diff_eq!(item_based_predict(&data, 2, 1, cfg).unwrap(), 11.0 / 3.0, epsilon = 1e-12);
        assert!(NeighborModel::fit(&data, Orientation::UserBased, NeighborConfig { k_neighbors: Some(0), ..cfg }).is_err());
    }

    #[test]
    fn weighted_average_and_top_k() {
        // Target user 0 and three neighbours with different overlap profiles.
        let data = dataset(
            4,
            4,
            &[(0, 0, 4), (0, 1, 0), (1, 0, 4), (1, 1, 0), (1, 3, 4), (2, 0, 4), (2, 1, 4), (2, 3, 1), (3, 2, 2), (3, 3, 2)],
        );
        let all = NeighborModel::fit(&data, Orientation::UserBased, NeighborConfig::default()).unwrap();
        let s1 = all.similarity(0, 1);
        let s2 = all.similarity(0, 2);
        assert_abs_diff_eq!(s1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s2, 30.0 / (26f64.sqrt() * 50f64.sqrt()), epsilon = 1e-12);
        assert_eq!(all.similarity(0, 3), 0.0);
        let expected = (s1 * 5.0 + s2 * 2.0) / (s1 + s2);
        assert_abs_diff_eq!(all.predict(0, 3).unwrap(), expected, epsilon = 1e-12);
        let top1 = NeighborModel::fit(&data, Orientation::UserBased, NeighborConfig { k_neighbors: Some(1), ..Default::default() })
            .unwrap();
        assert_eq!(top1.predict(0, 3).unwrap(), 5.0);
    }

    #[test]
    fn item_based_mirrors_user_based() {
        let triples = [(0, 0, 1), (1, 0, 3), (1, 1, 2), (2, 1, 4), (0, 2, 0), (2, 2, 3), (3, 0, 2), (3, 2, 4)];
        let data = dataset(4, 3, &triples);
        let flipped: Vec<_> = triples.iter().map(|&(i, j, s)| (j, i, s)).collect();
        let data_t = dataset(3, 4, &flipped);
        let cfg = NeighborConfig { fallback: Fallback::GlobalMean, ..Default::default() };
        for i in 0..4 {
            for j in 0..3 {
                let a = item_based_predict(&data, i, j, cfg).unwrap();
                let b = user_based_predict(&data_t, j, i, cfg).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pmf_fits_single_rating() {
        let data = dataset(1, 1, &[(0, 0, 3)]);
        let cfg = PmfConfig { rank: 1, regularization: 0.0, learning_rate: 0.05, max_epochs: 2000, tol: 0.0, ..Default::default() };
        let m = pmf_fit(&data, &cfg).unwrap();
        assert_abs_diff_eq!(m.predict(0, 0).unwrap(), 4.0, epsilon = 1e-6);
    }

    #[test]
    fn pmf_constant_ratings() {
        let triples: Vec<_> = (0..6).flat_map(|i| (0..5).filter(move |j| (i + j) % 2 == 0).map(move |j| (i, j, 2))).collect();
        let data = dataset(6, 5, &triples);
        let cfg = PmfConfig { regularization: 0.0, learning_rate: 0.02, max_epochs: 3000, tol: 0.0, seed: 4, ..Default::default() };
        let m = pmf_fit(&data, &cfg).unwrap();
        for &(i, j, _) in &triples {
            assert_abs_diff_eq!(m.predict(i, j).unwrap(), 3.0, epsilon = 1e-3);
        }
        for w in m.objective_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-8));
        }
    }

    #[test]
    fn pmf_divergence_is_reported() {
        let triples: Vec<_> = (0..20).flat_map(|i| (0..20).map(move |j| (i, j, (i * j) % 5))).collect();
        let data = dataset(20, 20, &triples);
        let cfg = PmfConfig { learning_rate: 5.0, ..Default::default() };
        let e = pmf_fit(&data, &cfg).unwrap_err();
        assert!(matches!(e, Bm2Error::PmfDiverged { .. }));
        assert!(e.to_string().contains("learning_rate"));
    }

    #[test]
    fn pmf_is_deterministic_and_validated() {
        let data = dataset(3, 3, &[(0, 0, 1), (1, 1, 3), (2, 2, 4), (0, 2, 2)]);
        let a = pmf_fit(&data, &PmfConfig::default()).unwrap();
        let b = pmf_fit(&data, &PmfConfig::default()).unwrap();
        assert_eq!(a.user_factors, b.user_factors);
        assert!(pmf_fit(&data, &PmfConfig { rank: 0, ..Default::default() }).is_err());
        assert!(pmf_fit(&data, &PmfConfig { learning_rate: 0.0, ..Default::default() }).is_err());
    }

    #[test]
    fn rounding_snaps_to_levels() {
        let mut preds = vec![(0, 0, 3.5), (0, 1, 3.51), (1, 0, 0.2)];
        round_to_scale(&mut preds, &RatingScale::integer(5).unwrap());
        assert_eq!(preds.iter().map(|p| p.2).collect::<Vec<_>>(), vec![3.0, 4.0, 1.0]);
    }

    fn sparse_vec() -> impl Strategy<Value = Vec<(usize, f64)>> {
        prop::collection::btree_map(0usize..15, 1.0f64..5.0, 0..10).prop_map(|m| m.into_iter().collect())
    }

    fn random_data() -> impl Strategy<Value = RatingDataset> {
        prop::collection::btree_map((0usize..8, 0usize..6), 0usize..5, 1..30).prop_map(|m| {
            let triples: Vec<_> = m.into_iter().map(|((i, j), s)| (i, j, s)).collect();
            dataset(8, 6, &triples)
        })
    }

    proptest! {
        #[test]
        fn cosine_is_symmetric_and_scale_free(a in sparse_vec(), b in sparse_vec(), c in 0.1f64..10.0) {
            prop_assert_eq!(cosine_similarity(&a, &b, 1), cosine_similarity(&b, &a, 1));
            let scaled: Vec<_> = a.iter().map(|&(i, x)| (i, c * x)).collect();
            if !a.is_empty() {
                prop_assert!((cosine_similarity(&a, &scaled, 1) - 1.0).abs() < 1e-12);
            }
            let s = cosine_similarity(&a, &b, 1);
            prop_assert!((-1.0..=1.0).contains(&s));
        }

        #[test]
        fn baseline_predictions_stay_in_range(data in random_data()) {
            let pmf = PmfConfig { max_epochs: 30, ..Default::default() };
            for method in Baseline::ALL {
                let preds = predict_baseline(method, &data, &data, NeighborConfig::default(), &pmf).unwrap();
                prop_assert!(preds.iter().all(|p| (1.0..=5.0).contains(&p.2)));
            }
        }

        #[test]
        fn pmf_objective_does_not_increase(data in random_data(), seed in 0u64..100) {
            let m = pmf_fit(&data, &PmfConfig { max_epochs: 50, seed, ..Default::default() }).unwrap();
            for w in m.objective_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-8 * w[0].abs());
            }
        }
    }
}
