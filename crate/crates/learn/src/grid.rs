//! Exhaustive hyperparameter search scored by cross-validation.
//!
//! Grid points are evaluated on the same folds used for the reported
//! metrics, which makes the winning score optimistic;
//! [`nested_cross_validate`] gives an unbiased alternative.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cv::{
    cross_validate_with_folds, derive_seed, kfold_assignments, split, CvResult, FoldMetrics,
    PredictionRecord, RegressionMetrics,
};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{r2, rmse};
use crate::model::{Family, ModelSpec, ParamValue, Params, Regressor};

pub type Grid = BTreeMap<String, Vec<ParamValue>>;

/// Cartesian product in key order; the last key varies fastest.
pub fn expand(grid: &Grid) -> Result<Vec<Params>> {
    let mut out = vec![Params::new()];
    for (key, values) in grid {
        if values.is_empty() {
            return Err(Error::Empty("grid values"));
        }
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.insert(key.clone(), v.clone());
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

pub fn default_grid(family: Family) -> Grid {
    let int = |v: &[i64]| v.iter().map(|&i| ParamValue::Int(i)).collect::<Vec<_>>();
    let float = |v: &[f64]| v.iter().map(|&x| ParamValue::Float(x)).collect::<Vec<_>>();
    let mut g = Grid::new();
    match family {
        Family::Linear => {}
        Family::RandomForest => {
            g.insert("n_estimators".into(), int(&[100, 300]));
            g.insert(
                "max_features".into(),
                vec![
                    ParamValue::Text("sqrt".into()),
                    ParamValue::Text("all".into()),
                ],
            );
            g.insert(
                "max_depth".into(),
                vec![ParamValue::Int(8), ParamValue::Int(16), ParamValue::Null],
            );
            g.insert("min_samples_split".into(), int(&[2, 8]));
            g.insert("min_samples_leaf".into(), int(&[1, 4]));
        }
        Family::AdaBoostR2 => {
            g.insert("n_estimators".into(), int(&[50, 100]));
            g.insert("learning_rate".into(), float(&[0.5, 1.0]));
            g.insert("max_depth".into(), int(&[1, 3]));
        }
        Family::Svr => {
            g.insert("C".into(), float(&[0.1, 1.0, 10.0]));
            g.insert("epsilon".into(), float(&[0.1, 0.5]));
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeaderboardEntry {
    pub rank: usize,
    pub grid_index: usize,
    pub params: Params,
    pub rmse_mean: f64,
    pub rmse_se: f64,
    pub r2_mean: f64,
    pub r2_se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub best: ModelSpec,
    pub best_cv: CvResult,
    /// descending by `r2_mean`, ties by lower `rmse_mean`, then grid order
    pub leaderboard: Vec<LeaderboardEntry>,
}

fn better(a: &RegressionMetrics, b: &RegressionMetrics) -> bool {
    a.r2_mean > b.r2_mean || (a.r2_mean == b.r2_mean && a.rmse_mean < b.rmse_mean)
}

pub fn grid_search(
    ds: &Dataset,
    family: Family,
    grid: &Grid,
    k: usize,
    split_seed: u64,
    model_seed: u64,
) -> Result<GridSearchResult> {
    let points = expand(grid)?;
    let specs: Vec<ModelSpec> = points
        .into_iter()
        .map(|p| ModelSpec::new(family, p, model_seed))
        .collect();
    specs.iter().try_for_each(ModelSpec::validate)?;
    let folds = kfold_assignments(ds.len(), k, split_seed)?;
    let mut results: Vec<CvResult> = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let r = cross_validate_with_folds(ds, spec, &folds, k)?;
        log::debug!(
            "grid {}/{} {:?}: r2 {:.4}",
            i + 1,
            specs.len(),
            spec.params,
            r.metrics.r2_mean
        );
        results.push(r);
    }
    let mut order: Vec<usize> = (0..specs.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (&results[a].metrics, &results[b].metrics);
        if better(ma, mb) {
            std::cmp::Ordering::Less
        } else if better(mb, ma) {
            std::cmp::Ordering::Greater
        } else {
            a.cmp(&b)
        }
    });
    let leaderboard = order
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let m = &results[i].metrics;
            LeaderboardEntry {
                rank: rank + 1,
                grid_index: i,
                params: specs[i].params.clone(),
                rmse_mean: m.rmse_mean,
                rmse_se: m.rmse_se,
                r2_mean: m.r2_mean,
                r2_se: m.r2_se,
            }
        })
        .collect();
    let best = order[0];
    Ok(GridSearchResult {
        best: specs[best].clone(),
        best_cv: results.swap_remove(best),
        leaderboard,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedResult {
    pub metrics: RegressionMetrics,
    pub predictions: Vec<PredictionRecord>,
    /// winning parameters of each outer fold's inner search
    pub chosen: Vec<Params>,
}

/// Outer folds score models whose hyperparameters were picked by an inner
/// search over the outer training rows only.
pub fn nested_cross_validate(
    ds: &Dataset,
    family: Family,
    grid: &Grid,
    k_outer: usize,
    k_inner: usize,
    split_seed: u64,
    model_seed: u64,
) -> Result<NestedResult> {
    let folds = kfold_assignments(ds.len(), k_outer, split_seed)?;
    let mut predictions: Vec<Option<PredictionRecord>> = vec![None; ds.len()];
    let mut per_fold = Vec::with_capacity(k_outer);
    let mut chosen = Vec::with_capacity(k_outer);
    for f in 0..k_outer {
        let (train, test) = split(&folds, f);
        let tr = ds.subset(&train);
        let inner = grid_search(
            &tr,
            family,
            grid,
            k_inner,
            derive_seed(split_seed, f as u64 + 1),
            model_seed,
        )?;
        let model = inner
            .best
            .with_seed(derive_seed(model_seed, f as u64))
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
        chosen.push(inner.best.params);
    }
    Ok(NestedResult {
        metrics: RegressionMetrics::from_folds(per_fold),
        predictions: predictions
            .into_iter()
            .map(|p| p.expect("every row lies in one fold"))
            .collect(),
        chosen,
    })
}
