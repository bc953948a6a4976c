use hyperlex_learn::cv::{cross_validate, kfold_assignments};
use hyperlex_learn::forest::{ForestParams, RandomForest};
use hyperlex_learn::grid::{expand, grid_search, nested_cross_validate, Grid};
use hyperlex_learn::metrics::{r2, rmse, rss};
use hyperlex_learn::model::{Family, ModelSpec, ParamValue, Params, Regressor};
use hyperlex_learn::shap::{shap_summary, shapley_values, ShapConfig};
use hyperlex_learn::tree::TreeParams;
use hyperlex_learn::Dataset;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn synthetic(n: usize, d: usize, seed: u64, f: impl Fn(&[f64]) -> f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect();
    let y = x
        .iter()
        .map(|r| f(r) + 0.05 * rng.gen_range(-1.0..1.0))
        .collect();
    Dataset::new(
        (0..n).map(|i| format!("word{i:04}")).collect(),
        (0..d).map(|j| format!("f{j}")).collect(),
        x,
        y,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn rmse_squared_times_n_is_rss(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
        let (t, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let direct: f64 = (0..t.len()).map(|i| (t[i] - p[i]) * (t[i] - p[i])).sum();
        let s = rss(&t, &p).unwrap();
        prop_assert!((s - direct).abs() <= 1e-9 * direct.max(1.0));
        let r = rmse(&t, &p).unwrap();
        prop_assert!((r * r * t.len() as f64 - s).abs() <= 1e-9 * s.max(1.0));
    }

    #[test]
    fn r2_invariant_under_common_affine_map(
        pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..30),
        a in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0],
        b in -100.0f64..100.0,
    ) {
        let (t, p): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let spread = t.iter().copied().fold(f64::NEG_INFINITY, f64::max) - t.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assume!(spread > 1e-3);
        let map = |v: &[f64]| v.iter().map(|x| a * x + b).collect::<Vec<_>>();
        let before = r2(&t, &p).unwrap();
        let after = r2(&map(&t), &map(&p)).unwrap();
        prop_assert!((before - after).abs() <= 1e-8 * before.abs().max(1.0));
    }
}

#[test]
fn predictor_copy_target_is_perfect_under_linear_cv() {
    let mut ds = synthetic(50, 3, 1, |r| r[0]);
    ds.y = ds.x.iter().map(|r| r[1]).collect();
    let cv = cross_validate(&ds, &ModelSpec::default_for(Family::Linear, 0), 10, 7).unwrap();
    assert!((cv.metrics.r2_mean - 1.0).abs() < 1e-9);
    assert!(cv.metrics.rmse_mean < 1e-9);
}

#[test]
fn forest_training_fit_improves_with_depth() {
    let ds = synthetic(200, 3, 2, |r| (2.0 * r[0]).sin() + r[1] * r[2]);
    let mut last = f64::NEG_INFINITY;
    for depth in [1, 2, 3, 4, 6, 8, 12] {
        let p = ForestParams {
            n_estimators: 10,
            tree: TreeParams {
                max_depth: Some(depth),
                ..TreeParams::default()
            },
            bootstrap: true,
        };
        let f = RandomForest::fit(&ds.x, &ds.y, &p, 5).unwrap();
        let score = r2(&ds.y, &f.predict(&ds.x)).unwrap();
        assert!(score >= last - 1e-12, "depth {depth}: {score} < {last}");
        last = score;
    }
}

#[test]
fn every_family_is_deterministic_under_cv() {
    let ds = synthetic(60, 4, 3, |r| r[0] - 0.5 * r[3]);
    for family in Family::ALL {
        let mut params = Params::new();
        if matches!(family, Family::RandomForest | Family::AdaBoostR2) {
            params.insert("n_estimators".into(), ParamValue::Int(8));
        }
        let spec = ModelSpec::new(family, params, 21);
        let a = cross_validate(&ds, &spec, 5, 9).unwrap();
        let b = cross_validate(&ds, &spec, 5, 9).unwrap();
        assert_eq!(a, b, "{family}");
        assert!(a.metrics.r2_mean > 0.3, "{family}: {}", a.metrics.r2_mean);
    }
}

#[test]
fn singleton_grid_returns_its_spec() {
    let ds = synthetic(40, 2, 4, |r| r[0]);
    let mut g = Grid::new();
    g.insert("C".into(), vec![ParamValue::Float(2.0)]);
    let res = grid_search(&ds, Family::Svr, &g, 5, 0, 0).unwrap();
    assert_eq!(res.best.params, expand(&g).unwrap()[0]);
    assert_eq!(res.leaderboard.len(), 1);
}

#[test]
fn grid_winner_matches_leaderboard_rescan() {
    // a deep interaction target rewards the deeper forests in the grid
    let ds = synthetic(120, 3, 5, |r| if r[0] > 0.0 { r[1] * r[2] } else { -r[1] });
    let mut g = Grid::new();
    g.insert("n_estimators".into(), vec![ParamValue::Int(15)]);
    g.insert(
        "max_depth".into(),
        vec![ParamValue::Int(1), ParamValue::Int(3), ParamValue::Null],
    );
    let res = grid_search(&ds, Family::RandomForest, &g, 5, 1, 2).unwrap();
    let best_r2 = res
        .leaderboard
        .iter()
        .map(|e| e.r2_mean)
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(res.best_cv.metrics.r2_mean, best_r2);
    assert!(res
        .leaderboard
        .windows(2)
        .all(|w| w[0].r2_mean >= w[1].r2_mean));
    assert_ne!(res.best.params.get("max_depth"), Some(&ParamValue::Int(1)));
    let again = cross_validate(&ds, &res.best, 5, 1).unwrap();
    assert_eq!(again, res.best_cv);
}

#[test]
fn nested_cv_predicts_each_row_once() {
    let ds = synthetic(60, 2, 6, |r| 2.0 * r[0]);
    let mut g = Grid::new();
    g.insert(
        "C".into(),
        vec![ParamValue::Float(0.1), ParamValue::Float(10.0)],
    );
    let res = nested_cross_validate(&ds, Family::Svr, &g, 5, 3, 3, 4).unwrap();
    assert_eq!(res.predictions.len(), 60);
    assert_eq!(res.chosen.len(), 5);
    let folds = kfold_assignments(60, 5, 3).unwrap();
    assert!(res
        .predictions
        .iter()
        .zip(&folds)
        .all(|(p, &f)| p.fold == f));
}

#[test]
fn linear_shapley_matches_closed_form_on_random_backgrounds() {
    let coef = [1.5, -2.0, 0.25, 3.0, 0.0];
    let f = |x: &[f64]| -0.7 + x.iter().zip(coef).map(|(v, c)| v * c).sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let bg: Vec<Vec<f64>> = (0..7)
            .map(|_| (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let r = shapley_values(&f, &x, &bg).unwrap();
        for j in 0..5 {
            let bmean = bg.iter().map(|b| b[j]).sum::<f64>() / 7.0;
            assert!((r.attributions[j] - coef[j] * (x[j] - bmean)).abs() < 1e-8);
        }
        assert_eq!(r.attributions[4], 0.0);
        assert!(r.efficiency_gap().abs() < 1e-10);
    }
}

#[test]
fn forest_shapley_efficiency_and_unused_feature() {
    let mut ds = synthetic(80, 4, 9, |r| r[0] * r[1] + r[2]);
    ds.x.iter_mut().for_each(|r| r[3] = 1.0);
    let spec = ModelSpec::new(
        Family::RandomForest,
        [("n_estimators".to_string(), ParamValue::Int(10))].into(),
        3,
    );
    let model = spec.fit_scaled(&ds.x, &ds.y).unwrap();
    for i in 0..10 {
        let r = shapley_values(&model, &ds.x[i], &ds.x[20..60]).unwrap();
        assert!(r.efficiency_gap().abs() < 1e-9);
        assert_eq!(r.attributions[3], 0.0);
    }
}

#[test]
fn planted_signal_ranks_first() {
    let ds = synthetic(150, 5, 10, |r| 3.0 * r[2]);
    for family in [Family::Linear, Family::RandomForest] {
        let mut params = Params::new();
        if family == Family::RandomForest {
            params.insert("n_estimators".into(), ParamValue::Int(10));
        }
        let cfg = ShapConfig {
            background_size: 30,
            ..ShapConfig::default()
        };
        let s = shap_summary(&ModelSpec::new(family, params, 0), &ds, &cfg).unwrap();
        assert_eq!(s.importance[0].feature, "f2", "{family}");
        assert_eq!(s.records.len(), 30);
        assert!(s
            .importance
            .windows(2)
            .all(|w| w[0].mean_abs_attribution >= w[1].mean_abs_attribution));
        let mut out = Vec::new();
        s.write_values_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1 + 30 * 5);
    }
}
