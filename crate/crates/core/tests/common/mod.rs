//! Straightforward re-implementations of the model quantities, written
//! without sharing code with the library. Loops over explicit indices and
//! plain `Vec`s on purpose.

#![allow(dead_code)]

use bm2::synthetic::{self, OutlierCounts};
use bm2::{BlockArray, ModelConfig, Rating, RatingDataset, RatingScale, VariationalState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::{digamma, ln_gamma};

fn e_log(gamma: &[f64], k: usize) -> f64 {
    digamma(gamma[k]) - digamma(gamma.iter().sum())
}

fn log_norm(a: &[f64]) -> f64 {
    ln_gamma(a.iter().sum()) - a.iter().map(|&x| ln_gamma(x)).sum::<f64>()
}

fn row(a: &ndarray::Array2<f64>, r: usize) -> Vec<f64> {
    a.row(r).to_vec()
}

/// `E_q[ln p(R, π, Z | α, β, μ)] − E_q[ln q(π, Z)]` summed term by term.
pub fn elbo_direct(data: &RatingDataset, st: &VariationalState, mu: &BlockArray, cfg: &ModelConfig) -> f64 {
    let (k, l) = (cfg.k, cfg.l);
    let mut e_log_p = 0.0;
    let mut e_log_q = 0.0;
    for i in 0..data.n_users() {
        let g = row(&st.gamma_u, i);
        e_log_p += log_norm(&cfg.alpha) + (0..k).map(|a| (cfg.alpha[a] - 1.0) * e_log(&g, a)).sum::<f64>();
        e_log_q += log_norm(&g) + (0..k).map(|a| (g[a] - 1.0) * e_log(&g, a)).sum::<f64>();
    }
    for j in 0..data.n_items() {
        let g = row(&st.gamma_i, j);
        e_log_p += log_norm(&cfg.beta) + (0..l).map(|b| (cfg.beta[b] - 1.0) * e_log(&g, b)).sum::<f64>();
        e_log_q += log_norm(&g) + (0..l).map(|b| (g[b] - 1.0) * e_log(&g, b)).sum::<f64>();
    }
    for (r, rating) in data.ratings().iter().enumerate() {
        let gu = row(&st.gamma_u, rating.user);
        let gi = row(&st.gamma_i, rating.item);
        for a in 0..k {
            let p = st.phi_u[[r, a]];
            e_log_p += p * e_log(&gu, a);
            if p > 0.0 {
                e_log_q += p * p.ln();
            }
        }
        for b in 0..l {
            let p = st.phi_i[[r, b]];
            e_log_p += p * e_log(&gi, b);
            if p > 0.0 {
                e_log_q += p * p.ln();
            }
        }
        for a in 0..k {
            for b in 0..l {
                e_log_p += st.phi_u[[r, a]] * st.phi_i[[r, b]] * mu.get(a, b, rating.level).ln();
            }
        }
    }
    e_log_p - e_log_q
}

/// New φᵁ row for rating `r`, exponentiated and normalised directly.
pub fn phi_u_direct(data: &RatingDataset, st: &VariationalState, mu: &BlockArray, r: usize) -> Vec<f64> {
    let rating = data.ratings()[r];
    let g = row(&st.gamma_u, rating.user);
    let w: Vec<f64> = (0..mu.k())
        .map(|a| {
            let s: f64 = (0..mu.l()).map(|b| st.phi_i[[r, b]] * mu.get(a, b, rating.level).ln()).sum();
            (e_log(&g, a) + s).exp()
        })
        .collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// New φᴵ row for rating `r`, given the current φᵁ.
pub fn phi_i_direct(data: &RatingDataset, st: &VariationalState, mu: &BlockArray, r: usize) -> Vec<f64> {
    let rating = data.ratings()[r];
    let g = row(&st.gamma_i, rating.item);
    let w: Vec<f64> = (0..mu.l())
        .map(|b| {
            let s: f64 = (0..mu.k()).map(|a| st.phi_u[[r, a]] * mu.get(a, b, rating.level).ln()).sum();
            (e_log(&g, b) + s).exp()
        })
        .collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

/// Grid search over the 3-simplex at `step` for the block `(a, b)` that
/// maximises `Σ_r φᵁ_{r,a} φᴵ_{r,b} ln μ_{ab, s_r}`. The (φ, μ) part of the
/// ELBO is a sum of such independent block terms.
pub fn mu_block_grid_argmax(data: &RatingDataset, st: &VariationalState, a: usize, b: usize, step: f64) -> [f64; 3] {
    assert_eq!(data.levels(), 3);
    let mut w = [0.0; 3];
    for (r, rating) in data.ratings().iter().enumerate() {
        w[rating.level] += st.phi_u[[r, a]] * st.phi_i[[r, b]];
    }
    let objective = |m: [f64; 3]| -> f64 {
        (0..3)
            .map(|s| if w[s] == 0.0 { 0.0 } else if m[s] == 0.0 { f64::NEG_INFINITY } else { w[s] * m[s].ln() })
            .sum()
    };
    let n = (1.0 / step).round() as usize;
    let mut best = ([1.0 / 3.0; 3], f64::NEG_INFINITY);
    for x in 0..=n {
        for y in 0..=(n - x) {
            let m = [x as f64 * step, y as f64 * step, (n - x - y) as f64 * step];
            let v = objective(m);
            if v > best.1 {
                best = (m, v);
            }
        }
    }
    if best.1 == f64::NEG_INFINITY || w.iter().sum::<f64>() == 0.0 {
        // Flat objective: any point is a maximiser.
        return [1.0 / 3.0; 3];
    }
    best.0
}

/// Random instance with every user and item index in range and distinct
/// (user, item) pairs.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, m: usize, levels: usize, n_ratings: usize) -> RatingDataset {
    let pairs = rand::seq::index::sample(rng, n * m, n_ratings.min(n * m));
    let ratings = pairs.iter().map(|p| Rating::new(p / m, p % m, rng.random_range(0..levels))).collect();
    RatingDataset::new(n, m, RatingScale::integer(levels).unwrap(), ratings).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pooled Pearson statistic of the complete rating matrix against the
/// normalised block rows, with its degrees of freedom. Cells with zero
/// expected count must be empty and are left out.
pub fn block_chi_square(k: usize) -> (f64, f64, f64) {
    let sc = synthetic::builtin_scenario(k).unwrap().with_size(500, 200).with_eta(1.0).with_outlier_rate(0.0).with_seed(99);
    let sim = synthetic::generate(&sc).unwrap();
    let (l, s) = (sc.l(), sc.levels());
    let mut counts = vec![0.0; k * l * s];
    for r in sim.complete().ratings() {
        let (a, b) = (sim.true_user_clusters[r.user], sim.true_item_clusters[r.item]);
        counts[(a * l + b) * s + r.level] += 1.0;
    }
    let (mut stat, mut df) = (0.0, 0.0);
    for a in 0..k {
        for b in 0..l {
            let cell = &counts[(a * l + b) * s..(a * l + b + 1) * s];
            let n: f64 = cell.iter().sum();
            if n == 0.0 {
                continue;
            }
            let mut used = 0.0;
            for (lvl, &obs) in cell.iter().enumerate() {
                let expected = n * sc.mu.get(a, b, lvl);
                if expected == 0.0 {
                    assert_eq!(obs, 0.0, "impossible level drawn in block ({a}, {b})");
                    continue;
                }
                stat += (obs - expected).powi(2) / expected;
                used += 1.0;
            }
            df += used - 1.0;
        }
    }
    let p = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    (stat, df, p)
}

/// Regenerates scenario `k` with and without outliers from the same seed and
/// checks that exactly `round(0.1 · eligible)` cells moved, each from the top
/// level of the last block to the bottom one or the reverse in the first block.
pub fn check_outliers(k: usize, seed: u64) -> Result<OutlierCounts, String> {
    let base = synthetic::builtin_scenario(k).unwrap().with_eta(1.0).with_seed(seed);
    let (n, m, s) = (base.n_users, base.n_items, base.levels());
    let clean = synthetic::generate(&base.clone().with_outlier_rate(0.0)).unwrap();
    let noisy = synthetic::generate(&base.with_outlier_rate(0.1)).unwrap();
    let (before, after) = (clean.complete(), noisy.complete());
    let o = noisy.outliers;
    let expected = ((0.1 * o.eligible_high as f64).round() as usize, (0.1 * o.eligible_low as f64).round() as usize);
    if (o.flipped_high, o.flipped_low) != expected {
        return Err(format!("flipped {:?}, expected {expected:?}", (o.flipped_high, o.flipped_low)));
    }

    let level_at = |d: &bm2::RatingDataset| {
        let mut v = vec![usize::MAX; n * m];
        for r in d.ratings() {
            v[r.user * m + r.item] = r.level;
        }
        v
    };
    let (lb, la) = (level_at(&before), level_at(&after));
    let users = &clean.true_user_clusters;
    let items = &clean.true_item_clusters;
    let mut high_eligible = 0;
    let mut low_eligible = 0;
    let (mut down, mut up) = (0, 0);
    for p in 0..lb.len() {
        let (a, b) = (users[p / m], items[p % m]);
        if (a, b) == (k - 1, k - 1) && lb[p] == s - 1 {
            high_eligible += 1;
        }
        if (a, b) == (0, 0) && lb[p] == 0 {
            low_eligible += 1;
        }
        if lb[p] != la[p] {
            if (a, b) == (k - 1, k - 1) && (lb[p], la[p]) == (s - 1, 0) {
                down += 1;
            } else if (a, b) == (0, 0) && (lb[p], la[p]) == (0, s - 1) {
                up += 1;
            } else {
                return Err(format!("unexpected change at cell {p}: block ({a}, {b}), level {} -> {}", lb[p], la[p]));
            }
        }
    }
    if (high_eligible, low_eligible) != (o.eligible_high, o.eligible_low) {
        return Err(format!("eligible {:?}, reported {:?}", (high_eligible, low_eligible), (o.eligible_high, o.eligible_low)));
    }
    if (down, up) != (o.flipped_high, o.flipped_low) {
        return Err(format!("changed {:?}, reported {:?}", (down, up), (o.flipped_high, o.flipped_low)));
    }
    Ok(o)
}
