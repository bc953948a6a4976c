//! AdaBoost.R2 with linear loss over CART base learners.
//!
//! Each round fits the base learner to a resample of the training rows
//! drawn with probabilities equal to the current boosting weights; losses
//! are measured on every row.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{RegressionTree, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub base: TreeParams,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_estimators: 50,
            learning_rate: 1.0,
            base: TreeParams {
                max_depth: Some(1),
                ..TreeParams::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdaBoostR2 {
    pub estimators: Vec<RegressionTree>,
    pub estimator_weights: Vec<f64>,
    /// weighted average loss of each kept round
    pub round_losses: Vec<f64>,
}

impl AdaBoostR2 {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &BoostParams, seed: u64) -> Result<Self> {
        if params.n_estimators == 0 {
            return Err(Error::InvalidHyperparameter {
                name: "n_estimators".into(),
                value: "0".into(),
            });
        }
        if !(params.learning_rate > 0.0 && params.learning_rate.is_finite()) {
            return Err(Error::InvalidHyperparameter {
                name: "learning_rate".into(),
                value: params.learning_rate.to_string(),
            });
        }
        params.base.validate()?;
        let n = y.len();
        if n == 0 {
            return Err(Error::Empty("training rows"));
        }
        let mut w = vec![1.0 / n as f64; n];
        let mut model = AdaBoostR2 {
            estimators: Vec::new(),
            estimator_weights: Vec::new(),
            round_losses: Vec::new(),
        };
        for round in 0..params.n_estimators {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(round as u64);
            let counts = resample_counts(&w, &mut rng);
            let tree = RegressionTree::fit_weighted(x, y, &counts, &params.base, &mut rng)?;
            let err: Vec<f64> = x
                .iter()
                .zip(y)
                .map(|(r, t)| (tree.predict_row(r) - t).abs())
                .collect();
            let err_max = err.iter().copied().fold(0.0, f64::max);
            let loss: Vec<f64> = if err_max > 0.0 {
                err.iter().map(|e| e / err_max).collect()
            } else {
                err
            };
            let avg_loss: f64 = loss.iter().zip(&w).map(|(l, wi)| l * wi).sum();
            if avg_loss <= 0.0 {
                model.push(tree, 1.0, 0.0);
                break;
            }
            if avg_loss >= 0.5 {
                if model.estimators.is_empty() {
                    log::warn!("first boosting round has average loss {avg_loss:.3} >= 0.5; keeping it alone");
                    model.push(tree, 1.0, avg_loss);
                } else {
                    log::debug!("boosting stopped at round {round}: average loss {avg_loss:.3}");
                }
                break;
            }
            let beta = avg_loss / (1.0 - avg_loss);
            model.push(tree, params.learning_rate * (1.0 / beta).ln(), avg_loss);
            if round + 1 == params.n_estimators {
                break;
            }
            for (wi, l) in w.iter_mut().zip(&loss) {
                *wi *= beta.powf((1.0 - l) * params.learning_rate);
            }
            let total: f64 = w.iter().sum();
            if !(total > 0.0 && total.is_finite()) {
                log::warn!("boosting weights degenerated at round {round}; stopping");
                break;
            }
            w.iter_mut().for_each(|wi| *wi /= total);
        }
        Ok(model)
    }

    fn push(&mut self, tree: RegressionTree, weight: f64, loss: f64) {
        self.estimators.push(tree);
        self.estimator_weights.push(weight);
        self.round_losses.push(loss);
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict_row_staged(row, self.estimators.len())
    }

    /// Prediction from the first `rounds` estimators only.
    pub fn predict_row_staged(&self, row: &[f64], rounds: usize) -> f64 {
        let k = rounds.clamp(1, self.estimators.len());
        let preds: Vec<f64> = self.estimators[..k]
            .iter()
            .map(|t| t.predict_row(row))
            .collect();
        weighted_median(&preds, &self.estimator_weights[..k])
    }
}

/// Multiplicities of `weights.len()` draws with probabilities `weights`.
pub fn resample_counts<R: Rng>(weights: &[f64], rng: &mut R) -> Vec<f64> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cdf.push(acc);
    }
    let mut counts = vec![0.0; weights.len()];
    for _ in 0..weights.len() {
        let u = rng.gen::<f64>() * acc;
        let i = cdf.partition_point(|&c| c <= u).min(weights.len() - 1);
        counts[i] += 1.0;
    }
    counts
}

/// Smallest value whose cumulative weight reaches half the total.
pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    for &i in &order {
        acc += weights[i];
        if acc >= 0.5 * total {
            return values[i];
        }
    }
    values[order[order.len() - 1]]
}
