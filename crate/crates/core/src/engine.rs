//! Mean-field variational EM.
//!
//! One iteration runs the coordinate updates in a fixed order: user-side
//! responsibilities φᵁ (against the previous φᴵ), item-side
//! responsibilities φᴵ (against the fresh φᵁ), the Dirichlet parameters γ,
//! then the block array μ. Each update is the exact maximiser of the ELBO in
//! its own block, so the recorded ELBO trace never decreases beyond rounding.
//!
//! The rating likelihood enters the φ updates only through the indicator of
//! the observed level, and μ is the responsibility-weighted level frequency
//! in each block. Blocks that receive no responsibility mass fall back to the
//! uniform distribution.

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Bm2Error, Result};
use crate::model::{BlockArray, FitResult, ModelConfig, RatingDataset, VariationalState};
use crate::special::{expected_log_dirichlet, f1_unchecked};

/// Below this many ratings the φ sweeps stay on the calling thread.
const PARALLEL_MIN_RATINGS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// Uniform responsibilities with multiplicative `U(1 - jitter, 1 + jitter)`
    /// noise; μ starts at the global level histogram with the same noise.
    UniformJitter,
    /// Responsibilities drawn from a flat Dirichlet; μ is the M-step of
    /// those draws.
    RandomDirichlet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineOptions {
    pub init: InitStrategy,
    pub jitter_scale: f64,
    /// Probabilities are clamped to at least this value before taking logs.
    pub min_prob_floor: f64,
    pub elbo_check_every: usize,
    /// Run the per-rating φ sweeps on the rayon pool. Results are identical
    /// to the sequential sweep.
    pub parallel: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            init: InitStrategy::UniformJitter,
            jitter_scale: 0.1,
            min_prob_floor: 1e-10,
            elbo_check_every: 1,
            parallel: true,
        }
    }
}

impl EngineOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_scale > 0.0 && self.jitter_scale < 0.5) {
            return Err(Bm2Error::InvalidConfig(format!(
                "jitter_scale {} outside (0, 0.5)",
                self.jitter_scale
            )));
        }
        if !(self.min_prob_floor > 0.0 && self.min_prob_floor <= 1e-3) {
            return Err(Bm2Error::InvalidConfig(format!(
                "min_prob_floor {} outside (0, 1e-3]",
                self.min_prob_floor
            )));
        }
        if self.elbo_check_every == 0 {
            return Err(Bm2Error::InvalidConfig("elbo_check_every must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_dimensions(data: &RatingDataset, config: &ModelConfig) -> Result<()> {
    config.validate()?;
    if data.levels() < 2 {
        return Err(Bm2Error::InvalidDataset("rating scale needs at least two levels".into()));
    }
    Ok(())
}

/// Builds a self-consistent starting point: φ rows on the simplex, γ equal to
/// the prior plus the φ sums, and a valid μ.
pub fn init_state(
    data: &RatingDataset,
    config: &ModelConfig,
    opts: &EngineOptions,
) -> Result<(VariationalState, BlockArray)> {
    check_dimensions(data, config)?;
    opts.validate()?;
    let (k, l, s) = (config.k, config.l, data.levels());
    let n_ratings = data.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let (phi_u, phi_i) = match opts.init {
        InitStrategy::UniformJitter => {
            let jitter = opts.jitter_scale;
            let mut draw = |cols: usize| {
                let mut phi = Array2::from_shape_fn((n_ratings, cols), |_| 1.0 + jitter * (2.0 * rng.random::<f64>() - 1.0));
                normalize_rows(&mut phi);
                phi
            };
            (draw(k), draw(l))
        }
        InitStrategy::RandomDirichlet => {
            let mut draw = |cols: usize| {
                // Normalised unit exponentials are Dirichlet(1, ..., 1).
                let mut phi = Array2::from_shape_fn((n_ratings, cols), |_| -(1.0 - rng.random::<f64>()).ln());
                normalize_rows(&mut phi);
                phi
            };
            (draw(k), draw(l))
        }
    };

    let mut state = VariationalState {
        gamma_u: Array2::zeros((data.n_users(), k)),
        gamma_i: Array2::zeros((data.n_items(), l)),
        phi_u,
        phi_i,
    };
    update_gamma(data, &mut state, config);

    let mu = match opts.init {
        InitStrategy::UniformJitter => {
            let hist = data.level_histogram();
            let jitter = opts.jitter_scale;
            let weights = Array3::from_shape_fn((k, l, s), |(_, _, lvl)| {
                // Levels never seen still get a little mass so the first E-step
                // is not dominated by the probability floor.
                let base = hist[lvl] + 1.0 / (s as f64 * (n_ratings as f64 + 1.0));
                base * (1.0 + jitter * (2.0 * rng.random::<f64>() - 1.0))
            });
            BlockArray::from_weights(weights)?
        }
        InitStrategy::RandomDirichlet => update_mu(data, &state, s),
    };
    Ok((state, mu))
}

fn normalize_rows(a: &mut Array2<f64>) {
    for mut row in a.rows_mut() {
        let total: f64 = row.sum();
        row.mapv_inplace(|v| v / total);
    }
}

/// `ln max(μ, floor)` laid out as `[level][k][l]` so the K x L slab for one
/// rating is contiguous.
fn log_mu_by_level(mu: &BlockArray, floor: f64) -> Vec<f64> {
    let (k, l, s) = (mu.k(), mu.l(), mu.levels());
    let mut out = vec![0.0; s * k * l];
    for lvl in 0..s {
        for a in 0..k {
            for b in 0..l {
                out[(lvl * k + a) * l + b] = mu.get(a, b, lvl).max(floor).ln();
            }
        }
    }
    out
}

fn expected_log_rows(gamma: &Array2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros(gamma.raw_dim());
    for (g, mut o) in gamma.rows().into_iter().zip(out.rows_mut()) {
        let g = g.as_slice().expect("gamma rows are contiguous");
        expected_log_dirichlet(g, o.as_slice_mut().expect("contiguous"));
    }
    out
}

/// In-place softmax of a log-weight vector with max subtraction.
fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in logits.iter_mut() {
        *v /= total;
    }
}

fn sweep_rows<F>(target: &mut Array2<f64>, parallel: bool, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let cols = target.ncols();
    let rows = target.nrows();
    let slice = target.as_slice_mut().expect("phi arrays are in standard layout");
    if cols == 0 {
        return;
    }
    if parallel && rows >= PARALLEL_MIN_RATINGS {
        slice.par_chunks_mut(cols).enumerate().for_each(|(r, row)| f(r, row));
    } else {
        slice.chunks_mut(cols).enumerate().for_each(|(r, row)| f(r, row));
    }
}

/// φᵁ_{i→j,k} ∝ exp{ E[ln π_ik] + Σ_l φᴵ_{i←j,l} ln μ_{kl,s(i,j)} }.
pub fn update_phi_u(data: &RatingDataset, state: &mut VariationalState, mu: &BlockArray, opts: &EngineOptions) {
    let (k, l) = (mu.k(), mu.l());
    let log_mu = log_mu_by_level(mu, opts.min_prob_floor);
    let elog = expected_log_rows(&state.gamma_u);
    let phi_i = &state.phi_i;
    let ratings = data.ratings();
    sweep_rows(&mut state.phi_u, opts.parallel, |r, row| {
        let rating = ratings[r];
        let item_resp = phi_i.row(r);
        let slab = &log_mu[rating.level * k * l..(rating.level + 1) * k * l];
        for a in 0..k {
            let block_row = &slab[a * l..(a + 1) * l];
            let mut acc = elog[[rating.user, a]];
            for (w, lm) in item_resp.iter().zip(block_row) {
                acc += w * lm;
            }
            row[a] = acc;
        }
        softmax_in_place(row);
    });
}

/// φᴵ_{i←j,l} ∝ exp{ E[ln π_jl] + Σ_k φᵁ_{i→j,k} ln μ_{kl,s(i,j)} }.
pub fn update_phi_i(data: &RatingDataset, state: &mut VariationalState, mu: &BlockArray, opts: &EngineOptions) {
    let (k, l) = (mu.k(), mu.l());
    let log_mu = log_mu_by_level(mu, opts.min_prob_floor);
    let elog = expected_log_rows(&state.gamma_i);
    let phi_u = &state.phi_u;
    let ratings = data.ratings();
    sweep_rows(&mut state.phi_i, opts.parallel, |r, row| {
        let rating = ratings[r];
        let user_resp = phi_u.row(r);
        let slab = &log_mu[rating.level * k * l..(rating.level + 1) * k * l];
        for b in 0..l {
            let mut acc = elog[[rating.item, b]];
            for (a, w) in user_resp.iter().enumerate() {
                acc += w * slab[a * l + b];
            }
            row[b] = acc;
        }
        softmax_in_place(row);
    });
}

/// γᵁ_i = α + Σ_{j ∈ U_i} φᵁ_{i→j} and γᴵ_j = β + Σ_{i ∈ I_j} φᴵ_{i←j}.
pub fn update_gamma(data: &RatingDataset, state: &mut VariationalState, config: &ModelConfig) {
    for (user, mut row) in state.gamma_u.rows_mut().into_iter().enumerate() {
        row.iter_mut().zip(&config.alpha).for_each(|(g, a)| *g = *a);
        for &r in data.user_ratings(user) {
            row += &state.phi_u.row(r);
        }
    }
    for (item, mut row) in state.gamma_i.rows_mut().into_iter().enumerate() {
        row.iter_mut().zip(&config.beta).for_each(|(g, b)| *g = *b);
        for &r in data.item_ratings(item) {
            row += &state.phi_i.row(r);
        }
    }
}

/// μ_{kl,s} = Σ φᵁ_k φᴵ_l 1(s(i,j) = s) / Σ φᵁ_k φᴵ_l over observed ratings.
pub fn update_mu(data: &RatingDataset, state: &VariationalState, levels: usize) -> BlockArray {
    let (k, l) = (state.phi_u.ncols(), state.phi_i.ncols());
    let mut weights = Array3::<f64>::zeros((k, l, levels));
    for (r, rating) in data.ratings().iter().enumerate() {
        let pu = state.phi_u.row(r);
        let pi = state.phi_i.row(r);
        for (a, &wu) in pu.iter().enumerate() {
            if wu == 0.0 {
                continue;
            }
            for (b, &wi) in pi.iter().enumerate() {
                weights[[a, b, rating.level]] += wu * wi;
            }
        }
    }
    for a in 0..k {
        for b in 0..l {
            let mut block = weights.slice_mut(ndarray::s![a, b, ..]);
            let total: f64 = block.sum();
            if total > 0.0 {
                block.mapv_inplace(|w| w / total);
            } else {
                block.fill(1.0 / levels as f64);
            }
        }
    }
    BlockArray::from_array_unchecked(weights)
}

/// Evidence lower bound `E_q[ln p(R, π, Z)] − E_q[ln q(π, Z)]`, assembled as
/// the constant, γ, (φ, γ) and (φ, μ) parts plus the normalisers of the
/// variational Dirichlets.
pub fn elbo(data: &RatingDataset, state: &VariationalState, mu: &BlockArray, config: &ModelConfig, floor: f64) -> f64 {
    let n = state.gamma_u.nrows() as f64;
    let m = state.gamma_i.nrows() as f64;
    let constant = n * f1_unchecked(&config.alpha) + m * f1_unchecked(&config.beta);

    let elog_u = expected_log_rows(&state.gamma_u);
    let elog_i = expected_log_rows(&state.gamma_i);

    let dirichlet_part = |gamma: &Array2<f64>, elog: &Array2<f64>, prior: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (g, e) in gamma.rows().into_iter().zip(elog.rows()) {
            for ((gv, ev), p) in g.iter().zip(e.iter()).zip(prior) {
                acc += (p - gv) * ev;
            }
            acc -= f1_unchecked(g.as_slice().expect("contiguous"));
        }
        acc
    };
    let gamma_terms =
        dirichlet_part(&state.gamma_u, &elog_u, &config.alpha) + dirichlet_part(&state.gamma_i, &elog_i, &config.beta);

    let log_mu = log_mu_by_level(mu, floor);
    let (k, l) = (mu.k(), mu.l());
    let mut phi_gamma = 0.0;
    let mut phi_mu = 0.0;
    for (r, rating) in data.ratings().iter().enumerate() {
        let pu = state.phi_u.row(r);
        let pi = state.phi_i.row(r);
        for (a, &w) in pu.iter().enumerate() {
            if w > 0.0 {
                phi_gamma += w * (elog_u[[rating.user, a]] - w.max(floor).ln());
            }
        }
        for (b, &w) in pi.iter().enumerate() {
            if w > 0.0 {
                phi_gamma += w * (elog_i[[rating.item, b]] - w.max(floor).ln());
            }
        }
        let slab = &log_mu[rating.level * k * l..(rating.level + 1) * k * l];
        for (a, &wu) in pu.iter().enumerate() {
            let mut inner = 0.0;
            for (b, &wi) in pi.iter().enumerate() {
                inner += wi * slab[a * l + b];
            }
            phi_mu += wu * inner;
        }
    }
    constant + gamma_terms + phi_gamma + phi_mu
}

/// One full iteration of the coordinate updates.
pub fn step(
    data: &RatingDataset,
    config: &ModelConfig,
    opts: &EngineOptions,
    state: &mut VariationalState,
    mu: &mut BlockArray,
) {
    update_phi_u(data, state, mu, opts);
    update_phi_i(data, state, mu, opts);
    update_gamma(data, state, config);
    *mu = update_mu(data, state, data.levels());
}

/// Runs variational EM from [`init_state`] until the relative ELBO change
/// drops below `config.rel_tol` or `config.max_iters` iterations have run.
pub fn fit(data: &RatingDataset, config: &ModelConfig, opts: &EngineOptions) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Bm2Error::InvalidDataset("cannot fit a model to an empty rating set".into()));
    }
    let (state, mu) = init_state(data, config, opts)?;
    fit_from(data, config, opts, state, mu)
}

/// Continues variational EM from a given state.
pub fn fit_from(
    data: &RatingDataset,
    config: &ModelConfig,
    opts: &EngineOptions,
    mut state: VariationalState,
    mut mu: BlockArray,
) -> Result<FitResult> {
    check_dimensions(data, config)?;
    opts.validate()?;
    let initial = elbo(data, &state, &mu, config, opts.min_prob_floor);
    if !initial.is_finite() {
        return Err(Bm2Error::NonFiniteElbo { iteration: 0 });
    }
    let mut trace = vec![initial];
    let mut converged = false;
    let mut n_iters = 0;

    for t in 1..=config.max_iters {
        step(data, config, opts, &mut state, &mut mu);
        n_iters = t;
        if t % opts.elbo_check_every != 0 && t != config.max_iters {
            continue;
        }
        let value = elbo(data, &state, &mu, config, opts.min_prob_floor);
        if !value.is_finite() {
            return Err(Bm2Error::NonFiniteElbo { iteration: t });
        }
        let prev = *trace.last().expect("trace starts non-empty");
        trace.push(value);
        let scale = prev.abs().max(f64::MIN_POSITIVE);
        if (value - prev).abs() <= config.rel_tol * scale {
            converged = true;
            break;
        }
    }
    log::debug!("variational EM stopped after {n_iters} iterations (converged: {converged})");
    Ok(FitResult { state, mu, elbo_trace: trace, n_iters, converged })
}
