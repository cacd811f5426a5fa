//! Bipartite mixed-membership stochastic block model for rating data.
//!
//! Users and items each carry a Dirichlet-distributed membership vector over
//! their own set of clusters, and every rating is drawn from a categorical
//! distribution attached to the (user cluster, item cluster) block. The crate
//! provides mean-field variational EM ([`engine::fit`]), plug-in MAP rating
//! prediction ([`predict`]), a synthetic benchmark generator
//! ([`synthetic`]), classical collaborative-filtering baselines
//! ([`baselines`]), cross-validated choice of the cluster counts
//! ([`selection`]) and file I/O ([`io`]).
//!
//! ```no_run
//! use bm2::{engine, predict, synthetic, EngineOptions, ModelConfig};
//!
//! let sim = synthetic::generate(&synthetic::builtin_scenario(5)?.with_seed(1))?;
//! let fit = engine::fit(&sim.observed, &ModelConfig::new(5, 5), &EngineOptions::default())?;
//! let est = predict::estimate_memberships(&fit);
//! let preds = predict::predict_all(&est, &fit.mu, &sim.hidden)?;
//! let report = predict::evaluate(&preds, &predict::truth_of(&sim.hidden))?;
//! println!("MAE {:.4}", report.mae);
//! # Ok::<(), bm2::Bm2Error>(())
//! ```

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod engine;
pub mod error;
pub mod io;
pub mod model;
pub mod predict;
pub mod selection;
pub mod special;
pub mod synthetic;

pub use engine::{EngineOptions, InitStrategy};
pub use error::{Bm2Error, Result};
pub use model::{BlockArray, FitResult, ModelConfig, Rating, RatingDataset, RatingScale, VariationalState};
pub use predict::{EvalReport, MembershipEstimates};
