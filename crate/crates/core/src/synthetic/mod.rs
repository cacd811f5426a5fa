//! Synthetic rating benchmarks with planted user and item clusters.
//!
//! Every user and every item gets one hard cluster label drawn from the
//! normalised `alpha` / `beta` weights. Every user-item pair then receives a
//! rating drawn from the block distribution of its two labels. A fraction of
//! the extreme ratings between the most generous users and the best items
//! (and between the strictest users and the worst items) is flipped to the
//! opposite extreme, and finally each pair is revealed with probability `eta`.

mod config;
mod tables;

use ndarray::Array3;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand::distr::{Distribution, weighted::WeightedIndex};

pub use config::{read_scenario, scenario_from_str, scenario_to_string, write_scenario};

use crate::error::{Bm2Error, Result};
use crate::model::{BlockArray, Rating, RatingDataset, RatingScale};

/// How the rating distribution of a pair is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    /// `μ_{z_i z_j, ·}` for the sampled labels of the pair.
    PerPair,
    /// The single mixture `Σ_k Σ_l α_k μ_{kl,·} β_l`, shared by every pair.
    Global,
}

/// How observed pairs are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskMode {
    /// Each pair independently with probability `eta`.
    Bernoulli,
    /// Exactly `round(eta * N * M)` pairs, uniformly without replacement.
    ExactCount,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub n_users: usize,
    pub n_items: usize,
    /// Cluster weights for users (need not sum to one).
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub mu: BlockArray,
    pub scale: RatingScale,
    /// Fraction of pairs that are observed.
    pub eta: f64,
    pub outlier_rate: f64,
    pub seed: u64,
    pub delta: DeltaMode,
    pub mask: MaskMode,
    /// Free-form provenance notes carried into exported configs.
    pub notes: Vec<String>,
}

impl SimScenario {
    pub const DEFAULT_OUTLIER_RATE: f64 = 0.10;

    pub fn k(&self) -> usize {
        self.mu.k()
    }

    pub fn l(&self) -> usize {
        self.mu.l()
    }

    pub fn levels(&self) -> usize {
        self.mu.levels()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_size(mut self, n_users: usize, n_items: usize) -> Self {
        self.n_users = n_users;
        self.n_items = n_items;
        self
    }

    pub fn with_outlier_rate(mut self, rate: f64) -> Self {
        self.outlier_rate = rate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Bm2Error::InvalidConfig(msg));
        if self.alpha.len() != self.k() || self.beta.len() != self.l() {
            return bad(format!(
                "alpha/beta lengths {}/{} do not match the {} x {} block array",
                self.alpha.len(),
                self.beta.len(),
                self.k(),
                self.l()
            ));
        }
        if self.scale.len() != self.levels() {
            return bad(format!("scale has {} levels but mu has {}", self.scale.len(), self.levels()));
        }
        for w in [&self.alpha, &self.beta] {
            if w.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) || !(w.iter().sum::<f64>() > 0.0) {
                return bad("cluster weights must be nonnegative with positive total".into());
            }
        }
        if self.n_users == 0 || self.n_items == 0 {
            return bad("scenario needs at least one user and one item".into());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta {} outside (0, 1]", self.eta));
        }
        if !(0.0..=1.0).contains(&self.outlier_rate) {
            return bad(format!("outlier_rate {} outside [0, 1]", self.outlier_rate));
        }
        Ok(())
    }

    /// The pooled rating distribution `Σ_k Σ_l α_k μ_{kl,·} β_l` with
    /// normalised weights.
    pub fn marginal_distribution(&self) -> Vec<f64> {
        let a = normalized(&self.alpha);
        let b = normalized(&self.beta);
        let mut delta = vec![0.0; self.levels()];
        for (ka, wa) in a.iter().enumerate() {
            for (lb, wb) in b.iter().enumerate() {
                for (d, m) in delta.iter_mut().zip(self.mu.block(ka, lb)) {
                    *d += wa * wb * m;
                }
            }
        }
        delta
    }
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

/// Published block matrices of a builtin scenario as printed, indexed
/// `[level][k][l]`, before any row normalisation or filling.
pub fn builtin_level_matrices(k: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    fn rows<const N: usize>(m: &[&[f64; N]]) -> Vec<Vec<f64>> {
        m.iter().map(|r| r.to_vec()).collect()
    }
    use tables::*;
    Ok(match k {
        5 => vec![rows(MU5_LEVEL1), rows(MU5_LEVEL2), rows(MU5_LEVEL3), rows(MU5_LEVEL4), rows(MU5_LEVEL5)],
        7 => vec![rows(MU7_LEVEL1), rows(MU7_LEVEL2), rows(MU7_LEVEL3), rows(MU7_LEVEL4), rows(MU7_LEVEL5)],
        9 => vec![rows(MU9_LEVEL1), rows(MU9_LEVEL2), rows(MU9_LEVEL3), rows(MU9_LEVEL4), rows(MU9_LEVEL5)],
        other => return Err(Bm2Error::UnsupportedScenario(other)),
    })
}

/// The 300-user, 200-item benchmark with `k` user and `k` item clusters and
/// five rating levels. Each `(k, l)` vector across the five level matrices
/// is rescaled to sum to one.
pub fn builtin_scenario(k: usize) -> Result<SimScenario> {
    let mut levels = builtin_level_matrices(k)?;
    let (alpha, beta) = match k {
        5 => (tables::ALPHA5.to_vec(), tables::BETA5.to_vec()),
        7 => (tables::ALPHA7.to_vec(), tables::BETA7.to_vec()),
        _ => (tables::ALPHA9.to_vec(), tables::BETA9.to_vec()),
    };
    let mut notes = Vec::new();
    for (lvl, matrix) in levels.iter_mut().enumerate() {
        while matrix.len() < k {
            let last = matrix.last().expect("published matrices are non-empty").clone();
            notes.push(format!(
                "level {} row {} missing from the published matrix; repeated row {}",
                lvl + 1,
                matrix.len() + 1,
                matrix.len()
            ));
            matrix.push(last);
        }
    }
    let s = levels.len();
    let weights = Array3::from_shape_fn((k, k, s), |(a, b, lvl)| levels[lvl][a][b]);
    Ok(SimScenario {
        n_users: 300,
        n_items: 200,
        alpha,
        beta,
        mu: BlockArray::from_weights(weights)?,
        scale: RatingScale::integer(s)?,
        eta: 0.2,
        outlier_rate: SimScenario::DEFAULT_OUTLIER_RATE,
        seed: 0,
        delta: DeltaMode::PerPair,
        mask: MaskMode::Bernoulli,
        notes,
    })
}

/// Counts from the outlier injection step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutlierCounts {
    /// Top-level ratings between the last user cluster and the last item cluster.
    pub eligible_high: usize,
    pub flipped_high: usize,
    /// Bottom-level ratings between the first user cluster and the first item cluster.
    pub eligible_low: usize,
    pub flipped_low: usize,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub observed: RatingDataset,
    pub hidden: RatingDataset,
    pub true_user_clusters: Vec<usize>,
    pub true_item_clusters: Vec<usize>,
    pub outliers: OutlierCounts,
}

impl SimOutput {
    /// Observed and hidden ratings together.
    pub fn complete(&self) -> RatingDataset {
        let mut all = self.observed.ratings().to_vec();
        all.extend_from_slice(self.hidden.ratings());
        all.sort_unstable();
        RatingDataset::new(self.observed.n_users(), self.observed.n_items(), self.observed.scale().clone(), all)
            .expect("observed and hidden are disjoint")
    }
}

fn outlier_target_count(rate: f64, eligible: usize) -> usize {
    (rate * eligible as f64).round() as usize
}

pub fn generate(scenario: &SimScenario) -> Result<SimOutput> {
    scenario.validate()?;
    let (n, m, s) = (scenario.n_users, scenario.n_items, scenario.levels());
    let (k, l) = (scenario.k(), scenario.l());
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    let user_dist = WeightedIndex::new(&scenario.alpha).map_err(|e| Bm2Error::InvalidConfig(e.to_string()))?;
    let item_dist = WeightedIndex::new(&scenario.beta).map_err(|e| Bm2Error::InvalidConfig(e.to_string()))?;
    let user_clusters: Vec<usize> = (0..n).map(|_| user_dist.sample(&mut rng)).collect();
    let item_clusters: Vec<usize> = (0..m).map(|_| item_dist.sample(&mut rng)).collect();

    let cumulative = |p: &[f64]| -> Vec<f64> {
        let mut acc = 0.0;
        p.iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect()
    };
    let block_cdfs: Vec<Vec<f64>> = match scenario.delta {
        DeltaMode::PerPair => (0..k)
            .flat_map(|a| (0..l).map(move |b| (a, b)))
            .map(|(a, b)| cumulative(&scenario.mu.block(a, b).to_vec()))
            .collect(),
        DeltaMode::Global => vec![cumulative(&scenario.marginal_distribution())],
    };
    let draw_level = |cdf: &[f64], u: f64| cdf.iter().position(|&c| u < c).unwrap_or(s - 1);

    let mut levels = vec![0usize; n * m];
    for i in 0..n {
        for j in 0..m {
            let cdf = match scenario.delta {
                DeltaMode::PerPair => &block_cdfs[user_clusters[i] * l + item_clusters[j]],
                DeltaMode::Global => &block_cdfs[0],
            };
            levels[i * m + j] = draw_level(cdf, rng.random::<f64>());
        }
    }

    // Both eligible sets are fixed before any flip.
    let eligible = |uc: usize, ic: usize, level: usize| -> Vec<usize> {
        (0..n * m)
            .filter(|&p| user_clusters[p / m] == uc && item_clusters[p % m] == ic && levels[p] == level)
            .collect()
    };
    let high = eligible(k - 1, l - 1, s - 1);
    let low = eligible(0, 0, 0);
    let mut outliers = OutlierCounts { eligible_high: high.len(), eligible_low: low.len(), ..Default::default() };
    let mut flip = |pool: &[usize], to: usize, rng: &mut ChaCha8Rng| -> usize {
        let count = outlier_target_count(scenario.outlier_rate, pool.len());
        for idx in index::sample(rng, pool.len(), count) {
            levels[pool[idx]] = to;
        }
        count
    };
    outliers.flipped_high = flip(&high, 0, &mut rng);
    outliers.flipped_low = flip(&low, s - 1, &mut rng);

    let mut observed_mask = vec![false; n * m];
    match scenario.mask {
        MaskMode::Bernoulli => {
            for obs in observed_mask.iter_mut() {
                *obs = rng.random::<f64>() < scenario.eta;
            }
        }
        MaskMode::ExactCount => {
            let count = ((scenario.eta * (n * m) as f64).round() as usize).min(n * m);
            for p in index::sample(&mut rng, n * m, count) {
                observed_mask[p] = true;
            }
        }
    }

    let mut observed = Vec::new();
    let mut hidden = Vec::new();
    for (p, &lvl) in levels.iter().enumerate() {
        let rating = Rating::new(p / m, p % m, lvl);
        if observed_mask[p] {
            observed.push(rating);
        } else {
            hidden.push(rating);
        }
    }
    Ok(SimOutput {
        observed: RatingDataset::new(n, m, scenario.scale.clone(), observed)?,
        hidden: RatingDataset::new(n, m, scenario.scale.clone(), hidden)?,
        true_user_clusters: user_clusters,
        true_item_clusters: item_clusters,
        outliers,
    })
}
