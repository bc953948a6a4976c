//! Bagged CART regression trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree::{RegressionTree, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            tree: TreeParams::default(),
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomForest {
    pub trees: Vec<RegressionTree>,
}

impl RandomForest {
    /// Tree `t` draws its bootstrap and feature samples from stream `t` of
    /// a generator seeded with `seed`.
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &ForestParams, seed: u64) -> Result<Self> {
        if params.n_estimators == 0 {
            return Err(Error::InvalidHyperparameter {
                name: "n_estimators".into(),
                value: "0".into(),
            });
        }
        params.tree.validate()?;
        if y.is_empty() {
            return Err(Error::Empty("training rows"));
        }
        let n = y.len();
        let trees = (0..params.n_estimators)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let mut weights = vec![if params.bootstrap { 0.0 } else { 1.0 }; n];
                if params.bootstrap {
                    for _ in 0..n {
                        weights[rng.gen_range(0..n)] += 1.0;
                    }
                }
                RegressionTree::fit_weighted(x, y, &weights, &params.tree, &mut rng)
            })
            .collect::<Result<_>>()?;
        Ok(RandomForest { trees })
    }

    pub fn tree_predictions(&self, row: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict_row(row)).collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::MaxFeatures;

    fn data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let y = x
            .iter()
            .map(|r| r[0] * 2.0 + (r[1] * 3.0).sin() + 0.1 * rng.gen::<f64>())
            .collect();
        (x, y)
    }

    #[test]
    fn single_unbagged_tree_is_plain_cart() {
        let (x, y) = data();
        let params = ForestParams {
            n_estimators: 1,
            bootstrap: false,
            tree: TreeParams::default(),
        };
        let forest = RandomForest::fit(&x, &y, &params, 17).unwrap();
        let tree = RegressionTree::fit(
            &x,
            &y,
            &TreeParams::default(),
            &mut ChaCha8Rng::seed_from_u64(99),
        )
        .unwrap();
        for r in &x {
            assert_eq!(forest.predict_row(r), tree.predict_row(r));
        }
    }

    #[test]
    fn prediction_is_tree_mean() {
        let (x, y) = data();
        let params = ForestParams {
            n_estimators: 7,
            tree: TreeParams {
                max_features: MaxFeatures::Sqrt,
                max_depth: Some(5),
                ..TreeParams::default()
            },
            bootstrap: true,
        };
        let f = RandomForest::fit(&x, &y, &params, 3).unwrap();
        for r in &x {
            let t = f.tree_predictions(r);
            assert!((f.predict_row(r) - t.iter().sum::<f64>() / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let (x, y) = data();
        let p = ForestParams {
            n_estimators: 5,
            ..ForestParams::default()
        };
        assert_eq!(
            RandomForest::fit(&x, &y, &p, 8).unwrap(),
            RandomForest::fit(&x, &y, &p, 8).unwrap()
        );
        assert_ne!(
            RandomForest::fit(&x, &y, &p, 8).unwrap(),
            RandomForest::fit(&x, &y, &p, 9).unwrap()
        );
    }
}
