//! Shuffled k-fold cross-validation with per-fold standardization.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{r2, rmse, summarize};
use crate::model::{ModelSpec, Regressor};

/// Independent 64-bit seed for task `stream` under `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Fold id of every row. The first `n % k` folds hold one extra row.
pub fn kfold_assignments(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k < 2 || k > n {
        return Err(Error::TooFewRows { rows: n, folds: k });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    let mut pos = 0;
    for f in 0..k {
        let size = n / k + usize::from(f < n % k);
        for &row in &perm[pos..pos + size] {
            fold[row] = f;
        }
        pos += size;
    }
    Ok(fold)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub rmse: f64,
    pub r2: f64,
}

/// Fold-level scores with their mean, sample std and standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionMetrics {
    pub k: usize,
    pub rmse_mean: f64,
    pub rmse_se: f64,
    pub rmse_std: f64,
    pub r2_mean: f64,
    pub r2_se: f64,
    pub r2_std: f64,
    pub per_fold: Vec<FoldMetrics>,
}

impl RegressionMetrics {
    pub fn from_folds(per_fold: Vec<FoldMetrics>) -> Self {
        let rm = summarize(&per_fold.iter().map(|f| f.rmse).collect::<Vec<_>>());
        let r = summarize(&per_fold.iter().map(|f| f.r2).collect::<Vec<_>>());
        RegressionMetrics {
            k: per_fold.len(),
            rmse_mean: rm.mean,
            rmse_se: rm.se,
            rmse_std: rm.std,
            r2_mean: r.mean,
            r2_se: r.se,
            r2_std: r.std,
            per_fold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub word: String,
    pub y_true: f64,
    pub y_pred: f64,
    /// `y_pred - y_true`
    pub residual: f64,
    pub fold: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub metrics: RegressionMetrics,
    /// one record per dataset row, in row order
    pub predictions: Vec<PredictionRecord>,
}

pub(crate) fn split(folds: &[usize], f: usize) -> (Vec<usize>, Vec<usize>) {
    (0..folds.len()).partition(|&i| folds[i] != f)
}

/// Fits `spec` on each training split and scores the held-out fold. Fold
/// `f` fits with seed `derive_seed(spec.seed, f)`.
pub fn cross_validate(ds: &Dataset, spec: &ModelSpec, k: usize, seed: u64) -> Result<CvResult> {
    spec.validate()?;
    let folds = kfold_assignments(ds.len(), k, seed)?;
    cross_validate_with_folds(ds, spec, &folds, k)
}

pub(crate) fn cross_validate_with_folds(
    ds: &Dataset,
    spec: &ModelSpec,
    folds: &[usize],
    k: usize,
) -> Result<CvResult> {
    let mut predictions: Vec<Option<PredictionRecord>> = vec![None; ds.len()];
    let mut per_fold = Vec::with_capacity(k);
    for f in 0..k {
        let (train, test) = split(folds, f);
        let tr = ds.subset(&train);
        let model = spec
            .with_seed(derive_seed(spec.seed, f as u64))
            .fit_scaled(&tr.x, &tr.y)?;
        let y_true: Vec<f64> = test.iter().map(|&i| ds.y[i]).collect();
        let y_pred: Vec<f64> = test.iter().map(|&i| model.predict_row(&ds.x[i])).collect();
        per_fold.push(FoldMetrics {
            fold: f,
            n_train: train.len(),
            n_test: test.len(),
            rmse: rmse(&y_true, &y_pred)?,
            r2: r2(&y_true, &y_pred)?,
        });
        for ((&i, t), p) in test.iter().zip(&y_true).zip(&y_pred) {
            predictions[i] = Some(PredictionRecord {
                word: ds.words[i].clone(),
                y_true: *t,
                y_pred: *p,
                residual: p - t,
                fold: f,
            });
        }
    }
    Ok(CvResult {
        metrics: RegressionMetrics::from_folds(per_fold),
        predictions: predictions
            .into_iter()
            .map(|p| p.expect("every row lies in one fold"))
            .collect(),
    })
}

pub fn write_predictions_csv<W: Write>(records: &[PredictionRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "y_true", "y_pred", "residual", "fold"])?;
    for r in records {
        w.write_record([
            r.word.clone(),
            r.y_true.to_string(),
            r.y_pred.to_string(),
            r.residual.to_string(),
            r.fold.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
