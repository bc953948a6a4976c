//! Exact interventional Shapley values by coalition enumeration.
//!
//! `v(S)` averages the model over background rows with the features in `S`
//! taken from the explained instance. All `2^d` coalitions are evaluated
//! once, so the efficiency identity holds to rounding error.

use std::io::Write;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Regressor};

pub const MAX_EXACT_FEATURES: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapRecord {
    pub word: String,
    pub attributions: Vec<f64>,
    /// mean background prediction, `v(∅)`
    pub base_value: f64,
    pub prediction: f64,
}

impl ShapRecord {
    /// `base_value + Σ attributions - prediction`
    pub fn efficiency_gap(&self) -> f64 {
        self.base_value + self.attributions.iter().sum::<f64>() - self.prediction
    }
}

/// `s! (d-s-1)! / d!` for coalition sizes `s` in `0..d`.
fn shapley_weights(d: usize) -> Vec<f64> {
    let fact: Vec<f64> = (0..=d)
        .scan(1.0, |acc, i| {
            if i > 0 {
                *acc *= i as f64;
            }
            Some(*acc)
        })
        .collect();
    (0..d)
        .map(|s| fact[s] * fact[d - s - 1] / fact[d])
        .collect()
}

pub fn shapley_values<M: Regressor + ?Sized>(
    model: &M,
    instance: &[f64],
    background: &[Vec<f64>],
) -> Result<ShapRecord> {
    let d = instance.len();
    if d > MAX_EXACT_FEATURES {
        return Err(Error::TooManyFeatures {
            got: d,
            max: MAX_EXACT_FEATURES,
        });
    }
    if background.is_empty() {
        return Err(Error::Empty("background rows"));
    }
    if let Some(bad) = background.iter().find(|b| b.len() != d) {
        return Err(Error::RaggedRows {
            expected: d,
            found: bad.len(),
        });
    }
    let n_coalitions = 1usize << d;
    let mut value = vec![0.0; n_coalitions];
    let mut hybrid = vec![0.0; d];
    for (mask, v) in value.iter_mut().enumerate() {
        let mut total = 0.0;
        for b in background {
            for j in 0..d {
                hybrid[j] = if mask >> j & 1 == 1 {
                    instance[j]
                } else {
                    b[j]
                };
            }
            total += model.predict_row(&hybrid);
        }
        *v = total / background.len() as f64;
    }
    let w = shapley_weights(d);
    let mut attributions = vec![0.0; d];
    for (i, phi) in attributions.iter_mut().enumerate() {
        let bit = 1usize << i;
        for mask in (0..n_coalitions).filter(|m| m & bit == 0) {
            *phi += w[mask.count_ones() as usize] * (value[mask | bit] - value[mask]);
        }
    }
    Ok(ShapRecord {
        word: String::new(),
        attributions,
        base_value: value[0],
        prediction: model.predict_row(instance),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapConfig {
    pub test_fraction: f64,
    pub background_size: usize,
    /// explain at most this many test rows
    pub max_instances: Option<usize>,
    pub seed: u64,
}

impl Default for ShapConfig {
    fn default() -> Self {
        ShapConfig {
            test_fraction: 0.2,
            background_size: 100,
            max_instances: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub feature: String,
    pub mean_abs_attribution: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapSummary {
    pub feature_names: Vec<String>,
    pub records: Vec<ShapRecord>,
    /// raw predictor values of each explained row, aligned with `records`
    pub feature_values: Vec<Vec<f64>>,
    /// descending by mean |attribution|, ties in feature order
    pub importance: Vec<FeatureImportance>,
}

pub fn rank_features(names: &[String], records: &[ShapRecord]) -> Vec<FeatureImportance> {
    let n = records.len().max(1) as f64;
    let means: Vec<f64> = (0..names.len())
        .map(|j| records.iter().map(|r| r.attributions[j].abs()).sum::<f64>() / n)
        .collect();
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| means[b].total_cmp(&means[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .enumerate()
        .map(|(rank, j)| FeatureImportance {
            feature: names[j].clone(),
            mean_abs_attribution: means[j],
            rank: rank + 1,
        })
        .collect()
}

/// Fits `spec` on a seeded train split and explains the test rows against
/// background rows drawn from train.
pub fn shap_summary(spec: &ModelSpec, ds: &Dataset, cfg: &ShapConfig) -> Result<ShapSummary> {
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(Error::InvalidHyperparameter {
            name: "test_fraction".into(),
            value: cfg.test_fraction.to_string(),
        });
    }
    if ds.n_features() > MAX_EXACT_FEATURES {
        return Err(Error::TooManyFeatures {
            got: ds.n_features(),
            max: MAX_EXACT_FEATURES,
        });
    }
    let n = ds.len();
    let n_test = ((n as f64 * cfg.test_fraction).round() as usize).clamp(1, n.saturating_sub(1));
    if n < 2 {
        return Err(Error::TooFewRows { rows: n, folds: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut test = perm[..n_test].to_vec();
    let mut train = perm[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();

    let tr = ds.subset(&train);
    let model = spec.fit_scaled(&tr.x, &tr.y)?;

    rng.set_stream(1);
    let mut bg_idx =
        index::sample(&mut rng, train.len(), cfg.background_size.min(train.len())).into_vec();
    bg_idx.sort_unstable();
    let background: Vec<Vec<f64>> = bg_idx.iter().map(|&i| tr.x[i].clone()).collect();

    if let Some(m) = cfg.max_instances.filter(|&m| m < test.len()) {
        rng.set_stream(2);
        let mut keep = index::sample(&mut rng, test.len(), m).into_vec();
        keep.sort_unstable();
        test = keep.into_iter().map(|i| test[i]).collect();
    }
    let mut records = Vec::with_capacity(test.len());
    for &i in &test {
        let mut rec = shapley_values(&model, &ds.x[i], &background)?;
        rec.word = ds.words[i].clone();
        records.push(rec);
    }
    Ok(ShapSummary {
        importance: rank_features(&ds.feature_names, &records),
        feature_names: ds.feature_names.clone(),
        feature_values: test.iter().map(|&i| ds.x[i].clone()).collect(),
        records,
    })
}

impl ShapSummary {
    /// One row per (word, feature): `word,feature,feature_value,attribution`.
    pub fn write_values_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "feature", "feature_value", "attribution"])?;
        for (rec, vals) in self.records.iter().zip(&self.feature_values) {
            for (j, name) in self.feature_names.iter().enumerate() {
                w.write_record([
                    rec.word.clone(),
                    name.clone(),
                    vals[j].to_string(),
                    rec.attributions[j].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["feature", "mean_abs_attribution", "rank"])?;
        for f in &self.importance {
            w.write_record([
                f.feature.clone(),
                f.mean_abs_attribution.to_string(),
                f.rank.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one_per_feature() {
        for d in 1..=10 {
            let w = shapley_weights(d);
            // Σ_s C(d-1, s) w(s) = 1
            let mut binom = 1.0;
            let mut total = 0.0;
            for (s, ws) in w.iter().enumerate() {
                total += binom * ws;
                binom = binom * (d - 1 - s) as f64 / (s + 1) as f64;
            }
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_model_gets_zero() {
        let f = |_: &[f64]| 3.5;
        let r = shapley_values(
            &f,
            &[1.0, 2.0, 3.0],
            &[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 1.0]],
        )
        .unwrap();
        assert!(r.attributions.iter().all(|&a| a == 0.0));
        assert_eq!(r.base_value, 3.5);
    }

    #[test]
    fn linear_model_closed_form() {
        let coef = [2.0, -1.0, 0.5];
        let f = |x: &[f64]| 0.3 + x.iter().zip(coef).map(|(v, c)| v * c).sum::<f64>();
        let x = [1.0, 4.0, -2.0];
        let b = [0.5, 1.0, 1.0];
        let r = shapley_values(&f, &x, &[b.to_vec()]).unwrap();
        for j in 0..3 {
            assert!((r.attributions[j] - coef[j] * (x[j] - b[j])).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_and_dummy_features() {
        let f = |x: &[f64]| x[0] * x[1] + x[0] + x[1];
        let r = shapley_values(
            &f,
            &[2.0, 2.0, 9.0],
            &[vec![0.0, 0.0, 0.0], vec![1.0, 1.0, 5.0]],
        )
        .unwrap();
        assert!((r.attributions[0] - r.attributions[1]).abs() < 1e-12);
        assert_eq!(r.attributions[2], 0.0);
        assert!(r.efficiency_gap().abs() < 1e-12);
    }

    #[test]
    fn rejects_oversized_and_empty() {
        let f = |_: &[f64]| 0.0;
        assert!(matches!(
            shapley_values(&f, &[0.0; 16], &[vec![0.0; 16]]),
            Err(Error::TooManyFeatures { got: 16, .. })
        ));
        assert!(shapley_values(&f, &[0.0; 2], &[]).is_err());
    }

    #[test]
    fn ranking_is_descending() {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let recs = vec![ShapRecord {
            word: "w".into(),
            attributions: vec![0.1, -0.5, 0.1],
            base_value: 0.0,
            prediction: -0.3,
        }];
        let r = rank_features(&names, &recs);
        assert_eq!(
            r.iter().map(|f| f.feature.as_str()).collect::<Vec<_>>(),
            ["b", "a", "c"]
        );
        assert_eq!(r.iter().map(|f| f.rank).collect::<Vec<_>>(), [1, 2, 3]);
    }
}
