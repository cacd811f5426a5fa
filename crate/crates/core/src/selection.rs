//! K-fold cross-validation over candidate cluster counts.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{self, EngineOptions};
use crate::error::{Bm2Error, Result};
use crate::io::format_table;
use crate::model::{ModelConfig, RatingDataset};
use crate::predict::{estimate_memberships, evaluate, predict_all, truth_of, EvalReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMetric {
    Mae,
    Mse,
}

impl SelectionMetric {
    fn of(self, report: &EvalReport) -> f64 {
        match self {
            SelectionMetric::Mae => report.mae,
            SelectionMetric::Mse => report.mse,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvPlan {
    pub n_folds: usize,
    /// Candidate `(K, L)` pairs.
    pub candidates: Vec<(usize, usize)>,
    /// Seed of the fold assignment.
    pub seed: u64,
    pub metric: SelectionMetric,
}

impl CvPlan {
    /// Five folds over `K = L = c` for every `c` in `sizes`, selecting on MAE.
    pub fn square(sizes: impl IntoIterator<Item = usize>, seed: u64) -> Self {
        CvPlan { n_folds: 5, candidates: sizes.into_iter().map(|c| (c, c)).collect(), seed, metric: SelectionMetric::Mae }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_folds < 2 {
            return Err(Bm2Error::InvalidConfig(format!("need at least 2 folds, got {}", self.n_folds)));
        }
        if self.candidates.is_empty() {
            return Err(Bm2Error::InvalidConfig("no candidate cluster counts".into()));
        }
        if self.candidates.iter().any(|&(k, l)| k == 0 || l == 0) {
            return Err(Bm2Error::InvalidConfig("candidate cluster counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Shuffle the ratings and deal them into `n_folds` folds whose sizes differ
/// by at most one. Entry `f` of the result is `(train, test)` with fold `f`
/// held out.
pub fn split_folds(data: &RatingDataset, n_folds: usize, seed: u64) -> Result<Vec<(RatingDataset, RatingDataset)>> {
    if n_folds < 2 {
        return Err(Bm2Error::InvalidConfig(format!("need at least 2 folds, got {n_folds}")));
    }
    if data.len() < n_folds {
        return Err(Bm2Error::InvalidDataset(format!("{} ratings cannot fill {n_folds} folds", data.len())));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold_of = vec![0; data.len()];
    for (pos, &idx) in order.iter().enumerate() {
        fold_of[idx] = pos % n_folds;
    }
    Ok((0..n_folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..data.len()).partition(|&idx| fold_of[idx] == f);
            (data.subset(&train), data.subset(&test))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvRow {
    pub k: usize,
    pub l: usize,
    pub fold_scores: Vec<f64>,
    pub mean_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub metric: SelectionMetric,
    /// One row per candidate, in plan order.
    pub rows: Vec<CvRow>,
    pub selected: (usize, usize),
}

/// Fit every candidate on every training fold with a non-informative prior
/// and score it on the held-out fold.
///
/// The winner has the smallest mean score; ties go to the smaller `K + L`,
/// then the smaller `K`. Engine settings other than the cluster counts and
/// prior (iteration limit, tolerance, seed) come from `template`.
pub fn cross_validate(
    data: &RatingDataset,
    plan: &CvPlan,
    template: &ModelConfig,
    opts: &EngineOptions,
) -> Result<CvReport> {
    plan.validate()?;
    let folds = split_folds(data, plan.n_folds, plan.seed)?;
    let jobs: Vec<(usize, usize)> =
        (0..plan.candidates.len()).flat_map(|c| (0..plan.n_folds).map(move |f| (c, f))).collect();
    let scores: Vec<f64> = jobs
        .par_iter()
        .map(|&(c, f)| {
            let (k, l) = plan.candidates[c];
            let config = ModelConfig::new(k, l).seed(template.seed).max_iters(template.max_iters).rel_tol(template.rel_tol);
            let (train, test) = &folds[f];
            let annotate = |source: Bm2Error| Bm2Error::CrossValidation { k, l, fold: f, source: Box::new(source) };
            let fit = engine::fit(train, &config, opts).map_err(annotate)?;
            let est = estimate_memberships(&fit);
            let preds = predict_all(&est, &fit.mu, test).map_err(annotate)?;
            let report = evaluate(&preds, &truth_of(test)).map_err(annotate)?;
            Ok(plan.metric.of(&report))
        })
        .collect::<Result<_>>()?;

    let rows: Vec<CvRow> = plan
        .candidates
        .iter()
        .enumerate()
        .map(|(c, &(k, l))| {
            let fold_scores = scores[c * plan.n_folds..(c + 1) * plan.n_folds].to_vec();
            let mean_score = fold_scores.iter().sum::<f64>() / plan.n_folds as f64;
            CvRow { k, l, fold_scores, mean_score }
        })
        .collect();
    let best = rows
        .iter()
        .min_by(|a, b| {
            a.mean_score.total_cmp(&b.mean_score).then((a.k + a.l).cmp(&(b.k + b.l))).then(a.k.cmp(&b.k))
        })
        .expect("candidates are non-empty");
    let selected = (best.k, best.l);
    Ok(CvReport { metric: plan.metric, rows, selected })
}

impl CvReport {
    fn metric_name(&self) -> &'static str {
        match self.metric {
            SelectionMetric::Mae => "mae",
            SelectionMetric::Mse => "mse",
        }
    }

    /// `k,l,fold,<metric>` with one line per fold, followed by a `mean` line
    /// per candidate.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e: csv::Error| Bm2Error::io(path, std::io::Error::other(e));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(["k", "l", "fold", self.metric_name(), "selected"]).map_err(io)?;
        for row in &self.rows {
            let chosen = if (row.k, row.l) == self.selected { "1" } else { "0" };
            for (f, score) in row.fold_scores.iter().enumerate() {
                w.write_record([row.k.to_string(), row.l.to_string(), (f + 1).to_string(), score.to_string(), chosen.into()])
                    .map_err(io)?;
            }
            w.write_record([row.k.to_string(), row.l.to_string(), "mean".into(), row.mean_score.to_string(), chosen.into()])
                .map_err(io)?;
        }
        w.flush().map_err(|e| Bm2Error::io(path, e))
    }

    pub fn to_table(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mark = if (r.k, r.l) == self.selected { "*" } else { "" };
                vec![format!("{}x{}{mark}", r.k, r.l), format!("{:.4}", r.mean_score)]
            })
            .collect();
        let header = match self.metric {
            SelectionMetric::Mae => "mean MAE",
            SelectionMetric::Mse => "mean MSE",
        };
        format_table(&["K x L", header], &cells)
    }
}
