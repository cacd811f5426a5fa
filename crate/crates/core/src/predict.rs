//! Membership point estimates, plug-in rating prediction, and the MAE / MSE /
//! accuracy-rate evaluation criteria.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::error::{Bm2Error, Result};
use crate::model::{BlockArray, FitResult, RatingDataset, RatingScale};

/// Row-normalised γ: the posterior-mean mixed memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipEstimates {
    pub pi_u: Array2<f64>,
    pub pi_i: Array2<f64>,
}

impl MembershipEstimates {
    pub fn n_users(&self) -> usize {
        self.pi_u.nrows()
    }

    pub fn n_items(&self) -> usize {
        self.pi_i.nrows()
    }

    /// Index of the largest component of every user row, ties to the
    /// smallest index.
    pub fn hard_user_clusters(&self) -> Vec<usize> {
        hard_assign(&self.pi_u)
    }

    pub fn hard_item_clusters(&self) -> Vec<usize> {
        hard_assign(&self.pi_i)
    }
}

fn hard_assign(pi: &Array2<f64>) -> Vec<usize> {
    pi.rows().into_iter().map(|row| first_argmax(row.iter().copied())).collect()
}

fn first_argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (idx, v) in values.enumerate() {
        if v > best_value {
            best = idx;
            best_value = v;
        }
    }
    best
}

fn row_normalize(gamma: &Array2<f64>) -> Array2<f64> {
    let mut pi = gamma.clone();
    for mut row in pi.rows_mut() {
        let total: f64 = row.sum();
        row.mapv_inplace(|v| v / total);
    }
    pi
}

pub fn estimate_memberships(result: &FitResult) -> MembershipEstimates {
    MembershipEstimates {
        pi_u: row_normalize(&result.state.gamma_u),
        pi_i: row_normalize(&result.state.gamma_i),
    }
}

fn check_index(what: &'static str, index: usize, size: usize) -> Result<()> {
    if index < size {
        Ok(())
    } else {
        Err(Bm2Error::IndexOutOfRange { what, index, size })
    }
}

/// `p_s = Σ_k Σ_l π̂ᵁ_{ik} μ_{kl,s} π̂ᴵ_{jl}`.
pub fn predict_distribution(est: &MembershipEstimates, mu: &BlockArray, user: usize, item: usize) -> Result<Vec<f64>> {
    check_index("user", user, est.n_users())?;
    check_index("item", item, est.n_items())?;
    let levels = mu.levels();
    let mut p = vec![0.0; levels];
    let pu = est.pi_u.row(user);
    let pi = est.pi_i.row(item);
    for (a, &wu) in pu.iter().enumerate() {
        for (b, &wi) in pi.iter().enumerate() {
            let w = wu * wi;
            for (ps, m) in p.iter_mut().zip(mu.block(a, b)) {
                *ps += w * m;
            }
        }
    }
    Ok(p)
}

/// Level index of the most probable rating; ties go to the smallest level.
pub fn predict_level(est: &MembershipEstimates, mu: &BlockArray, user: usize, item: usize) -> Result<usize> {
    let p = predict_distribution(est, mu, user, item)?;
    Ok(first_argmax(p.into_iter()))
}

/// Rating value `C_{s*}` of the most probable level.
pub fn predict(est: &MembershipEstimates, mu: &BlockArray, scale: &RatingScale, user: usize, item: usize) -> Result<f64> {
    Ok(scale.value(predict_level(est, mu, user, item)?))
}

/// Predicted values for every rating in `targets`, as `(user, item, value)`.
pub fn predict_all(
    est: &MembershipEstimates,
    mu: &BlockArray,
    targets: &RatingDataset,
) -> Result<Vec<(usize, usize, f64)>> {
    targets
        .ratings()
        .iter()
        .map(|r| Ok((r.user, r.item, predict(est, mu, targets.scale(), r.user, r.item)?)))
        .collect()
}

/// True values of a dataset as `(user, item, value)` triples.
pub fn truth_of(data: &RatingDataset) -> Vec<(usize, usize, f64)> {
    data.ratings().iter().map(|r| (r.user, r.item, data.value_of(r))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub mae: f64,
    pub mse: f64,
    /// Fraction of exact matches.
    pub ar: f64,
    pub n_evaluated: usize,
}

/// MAE, MSE and accuracy rate of `predictions` against `truth`; both lists
/// must cover exactly the same `(user, item)` keys.
pub fn evaluate(predictions: &[(usize, usize, f64)], truth: &[(usize, usize, f64)]) -> Result<EvalReport> {
    let mut preds = BTreeMap::new();
    let mut unexpected = Vec::new();
    for &(i, j, y) in predictions {
        if preds.insert((i, j), y).is_some() {
            // duplicated key
            unexpected.push((i, j));
        }
    }
    let truth: BTreeMap<(usize, usize), f64> = truth.iter().map(|&(i, j, y)| ((i, j), y)).collect();

    let missing: Vec<_> = truth.keys().filter(|k| !preds.contains_key(k)).copied().collect();
    unexpected.extend(preds.keys().filter(|k| !truth.contains_key(k)).copied());
    if !missing.is_empty() || !unexpected.is_empty() {
        return Err(Bm2Error::KeyMismatch { missing_predictions: missing, unexpected });
    }

    let n = truth.len();
    let (mut abs, mut sq, mut hits) = (0.0, 0.0, 0usize);
    for (key, &y) in &truth {
        let diff = preds[key] - y;
        abs += diff.abs();
        sq += diff * diff;
        if diff == 0.0 {
            hits += 1;
        }
    }
    let denom = n.max(1) as f64;
    Ok(EvalReport { mae: abs / denom, mse: sq / denom, ar: hits as f64 / denom, n_evaluated: n })
}

/// Mean and standard error of each metric over independent replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateSummary {
    pub n_replicates: usize,
    pub mae: f64,
    pub mae_se: f64,
    pub mse: f64,
    pub mse_se: f64,
    pub ar: f64,
    pub ar_se: f64,
}

fn mean_se(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

impl ReplicateSummary {
    pub fn from_reports(reports: &[EvalReport]) -> Self {
        let (mae, mae_se) = mean_se(reports.iter().map(|r| r.mae));
        let (mse, mse_se) = mean_se(reports.iter().map(|r| r.mse));
        let (ar, ar_se) = mean_se(reports.iter().map(|r| r.ar));
        ReplicateSummary { n_replicates: reports.len(), mae, mae_se, mse, mse_se, ar, ar_se }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array3};
    use proptest::prelude::*;

    fn est(pi_u: Array2<f64>, pi_i: Array2<f64>) -> MembershipEstimates {
        MembershipEstimates { pi_u, pi_i }
    }

    #[test]
    fn memberships_are_normalised_gamma() {
        use crate::model::{FitResult, VariationalState};
        let state = VariationalState {
            gamma_u: array![[2.0, 2.0], [1.0, 3.0]],
            gamma_i: array![[4.0]],
            phi_u: Array2::zeros((0, 2)),
            phi_i: Array2::zeros((0, 1)),
        };
        let fit = FitResult { state, mu: BlockArray::uniform(2, 1, 2), elbo_trace: vec![], n_iters: 0, converged: true };
        let e = estimate_memberships(&fit);
        assert_eq!(e.pi_u, array![[0.5, 0.5], [0.25, 0.75]]);
        assert_eq!(e.pi_i, array![[1.0]]);
        assert_eq!(e.hard_user_clusters(), vec![0, 1]);
    }

    #[test]
    fn single_block_prediction() {
        let mu = BlockArray::new(Array3::from_shape_vec((1, 1, 2), vec![0.1, 0.9]).unwrap()).unwrap();
        let e = est(array![[1.0]], array![[1.0]]);
        let scale = RatingScale::integer(2).unwrap();
        assert_eq!(predict(&e, &mu, &scale, 0, 0).unwrap(), 2.0);
        assert_eq!(predict_distribution(&e, &mu, 0, 0).unwrap(), vec![0.1, 0.9]);
    }

    #[test]
    fn ties_go_to_smallest_level() {
        let mu = BlockArray::uniform(2, 2, 4);
        let e = est(array![[0.5, 0.5]], array![[0.5, 0.5]]);
        assert_eq!(predict_level(&e, &mu, 0, 0).unwrap(), 0);
    }

    #[test]
    fn off_diagonal_block_prediction() {
        let mut w = Array3::from_elem((2, 2, 3), 1.0);
        w[[0, 1, 0]] = 0.2;
        w[[0, 1, 1]] = 0.5;
        w[[0, 1, 2]] = 0.3;
        let mu = BlockArray::from_weights(w).unwrap();
        let e = est(array![[1.0, 0.0]], array![[0.0, 1.0]]);
        let scale = RatingScale::integer(3).unwrap();
        assert_eq!(predict(&e, &mu, &scale, 0, 0).unwrap(), 2.0);
    }

    #[test]
    fn distribution_is_bilinear_form() {
        let mu = BlockArray::new(
            Array3::from_shape_vec((2, 2, 2), vec![0.9, 0.1, 0.6, 0.4, 0.3, 0.7, 0.2, 0.8]).unwrap(),
        )
        .unwrap();
        let e = est(array![[0.25, 0.75]], array![[0.5, 0.5]]);
        let p = predict_distribution(&e, &mu, 0, 0).unwrap();
        // 0.125*0.9 + 0.125*0.6 + 0.375*0.3 + 0.375*0.2
        assert_abs_diff_eq!(p[0], 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.625, epsilon = 1e-15);
    }

    #[test]
    fn uniform_memberships_average_the_blocks() {
        let mu = BlockArray::new(
            Array3::from_shape_vec((2, 2, 2), vec![1.0, 0.0, 0.5, 0.5, 0.0, 1.0, 0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let e = est(array![[0.5, 0.5]], array![[0.5, 0.5]]);
        assert_eq!(predict_distribution(&e, &mu, 0, 0).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn index_out_of_range() {
        let e = est(array![[1.0]], array![[1.0]]);
        let mu = BlockArray::uniform(1, 1, 2);
        assert!(matches!(predict_distribution(&e, &mu, 1, 0), Err(Bm2Error::IndexOutOfRange { what: "user", .. })));
        assert!(matches!(predict_distribution(&e, &mu, 0, 3), Err(Bm2Error::IndexOutOfRange { what: "item", .. })));
    }

    #[test]
    fn evaluate_examples() {
        let truth = vec![(0, 0, 1.0), (0, 1, 5.0)];
        let perfect = evaluate(&truth, &truth).unwrap();
        assert_eq!((perfect.mae, perfect.mse, perfect.ar, perfect.n_evaluated), (0.0, 0.0, 1.0, 2));
        let swapped = evaluate(&[(0, 0, 5.0), (0, 1, 1.0)], &truth).unwrap();
        assert_eq!((swapped.mae, swapped.mse, swapped.ar), (4.0, 16.0, 0.0));
    }

    #[test]
    fn evaluate_reports_key_mismatch() {
        let truth = vec![(0, 0, 1.0), (0, 1, 5.0)];
        match evaluate(&[(0, 0, 1.0), (3, 3, 2.0)], &truth) {
            Err(Bm2Error::KeyMismatch { missing_predictions, unexpected }) => {
                assert_eq!(missing_predictions, vec![(0, 1)]);
                assert_eq!(unexpected, vec![(3, 3)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        let dup = evaluate(&[(0, 0, 1.0), (0, 0, 1.0), (0, 1, 5.0)], &truth);
        assert!(matches!(dup, Err(Bm2Error::KeyMismatch { .. })));
    }

    #[test]
    fn replicate_summary() {
        let r = |mae| EvalReport { mae, mse: 1.0, ar: 0.5, n_evaluated: 10 };
        let s = ReplicateSummary::from_reports(&[r(1.0), r(2.0), r(3.0)]);
        assert_eq!(s.mae, 2.0);
        assert_abs_diff_eq!(s.mae_se, (1.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_eq!(s.mse_se, 0.0);
    }

    fn simplex_rows(rows: usize, cols: usize) -> impl Strategy<Value = Array2<f64>> {
        prop::collection::vec(0.01f64..1.0, rows * cols).prop_map(move |v| {
            let mut a = Array2::from_shape_vec((rows, cols), v).unwrap();
            for mut row in a.rows_mut() {
                let t = row.sum();
                row.mapv_inplace(|x| x / t);
            }
            a
        })
    }

    proptest! {
        #[test]
        fn prediction_is_argmax_of_distribution(
            pu in simplex_rows(3, 2),
            pi in simplex_rows(4, 3),
            w in prop::collection::vec(0.0f64..1.0, 2 * 3 * 4),
        ) {
            let mut weights = Array3::from_shape_vec((2, 3, 4), w).unwrap();
            weights.mapv_inplace(|x| x + 1e-3);
            let mu = BlockArray::from_weights(weights).unwrap();
            let e = est(pu, pi);
            for i in 0..3 {
                for j in 0..4 {
                    let p = predict_distribution(&e, &mu, i, j).unwrap();
                    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                    let s = predict_level(&e, &mu, i, j).unwrap();
                    prop_assert!(p.iter().enumerate().all(|(t, &v)| v < p[s] || (v == p[s] && t >= s)));
                }
            }
        }

        #[test]
        fn evaluate_is_permutation_invariant(
            vals in prop::collection::vec((1u8..=5, 1u8..=5), 1..40),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let truth: Vec<_> = vals.iter().enumerate().map(|(n, &(y, _))| (n, n % 3, y as f64)).collect();
            let mut preds: Vec<_> = vals.iter().enumerate().map(|(n, &(_, p))| (n, n % 3, p as f64)).collect();
            let a = evaluate(&preds, &truth).unwrap();
            preds.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = evaluate(&preds, &truth).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!((0.0..=1.0).contains(&a.ar) && a.mae <= 4.0);
        }
    }
}
