//! Model families, hyperparameter maps and fitted-model dispatch.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boost::{AdaBoostR2, BoostParams};
use crate::error::{Error, Result};
use crate::forest::{ForestParams, RandomForest};
use crate::linear::LinearModel;
use crate::scaler::Scaler;
use crate::svr::{LinearSvr, SvrParams};
use crate::tree::{MaxFeatures, TreeParams};

pub trait Regressor {
    fn predict_row(&self, row: &[f64]) -> f64;

    fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    RandomForest,
    AdaBoostR2,
    Svr,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Linear,
        Family::RandomForest,
        Family::AdaBoostR2,
        Family::Svr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::RandomForest => "random_forest",
            Family::AdaBoostR2 => "ada_boost_r2",
            Family::Svr => "svr",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Family::Linear => "Linear Regression",
            Family::RandomForest => "Random Forest",
            Family::AdaBoostR2 => "AdaBoost",
            Family::Svr => "SVR",
        }
    }

    pub fn allowed_keys(self) -> &'static [&'static str] {
        match self {
            Family::Linear => &[],
            Family::RandomForest => &[
                "bootstrap",
                "max_depth",
                "max_features",
                "min_samples_leaf",
                "min_samples_split",
                "n_estimators",
            ],
            Family::AdaBoostR2 => &[
                "learning_rate",
                "max_depth",
                "min_samples_leaf",
                "min_samples_split",
                "n_estimators",
            ],
            Family::Svr => &["C", "epsilon", "max_iter"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "linear" | "ols" | "linear_regression" => Ok(Family::Linear),
            "rf" | "random_forest" | "randomforest" => Ok(Family::RandomForest),
            "ada" | "adaboost" | "ada_boost" | "adaboost_r2" | "ada_boost_r2" => {
                Ok(Family::AdaBoostR2)
            }
            "svr" | "svm" => Ok(Family::Svr),
            other => Err(Error::UnknownFamily(other.into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    /// unbounded, e.g. `max_depth = none`
    Null,
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Bool(b) => write!(f, "{b}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
            ParamValue::Null => f.write_str("none"),
        }
    }
}

impl FromStr for ParamValue {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s.to_ascii_lowercase().as_str() {
            "none" | "null" => ParamValue::Null,
            "true" => ParamValue::Bool(true),
            "false" => ParamValue::Bool(false),
            _ => {
                if let Ok(i) = s.parse::<i64>() {
                    ParamValue::Int(i)
                } else if let Ok(x) = s.parse::<f64>() {
                    ParamValue::Float(x)
                } else {
                    ParamValue::Text(s.to_string())
                }
            }
        })
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// Renders parameters as `key=value` pairs in key order.
pub fn params_label(params: &Params) -> String {
    if params.is_empty() {
        return "default".into();
    }
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub family: Family,
    pub params: Params,
    pub seed: u64,
}

fn invalid(name: &str, v: &ParamValue) -> Error {
    Error::InvalidHyperparameter {
        name: name.into(),
        value: v.to_string(),
    }
}

fn get_usize(p: &Params, key: &str, default: usize) -> Result<usize> {
    match p.get(key) {
        None => Ok(default),
        Some(ParamValue::Int(i)) if *i >= 0 => Ok(*i as usize),
        Some(v) => Err(invalid(key, v)),
    }
}

fn get_opt_usize(p: &Params, key: &str, default: Option<usize>) -> Result<Option<usize>> {
    match p.get(key) {
        None => Ok(default),
        Some(ParamValue::Null) => Ok(None),
        Some(ParamValue::Int(i)) if *i > 0 => Ok(Some(*i as usize)),
        Some(v) => Err(invalid(key, v)),
    }
}

fn get_f64(p: &Params, key: &str, default: f64) -> Result<f64> {
    match p.get(key) {
        None => Ok(default),
        Some(ParamValue::Int(i)) => Ok(*i as f64),
        Some(ParamValue::Float(x)) if x.is_finite() => Ok(*x),
        Some(v) => Err(invalid(key, v)),
    }
}

fn get_bool(p: &Params, key: &str, default: bool) -> Result<bool> {
    match p.get(key) {
        None => Ok(default),
        Some(ParamValue::Bool(b)) => Ok(*b),
        Some(v) => Err(invalid(key, v)),
    }
}

fn get_max_features(p: &Params, key: &str) -> Result<MaxFeatures> {
    match p.get(key) {
        None | Some(ParamValue::Null) => Ok(MaxFeatures::All),
        Some(ParamValue::Text(s)) if s == "all" => Ok(MaxFeatures::All),
        Some(ParamValue::Text(s)) if s == "sqrt" => Ok(MaxFeatures::Sqrt),
        Some(ParamValue::Int(k)) if *k > 0 => Ok(MaxFeatures::Count(*k as usize)),
        Some(v) => Err(invalid(key, v)),
    }
}

impl ModelSpec {
    pub fn new(family: Family, params: Params, seed: u64) -> Self {
        ModelSpec {
            family,
            params,
            seed,
        }
    }

    pub fn default_for(family: Family, seed: u64) -> Self {
        ModelSpec::new(family, Params::new(), seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ModelSpec {
            seed,
            ..self.clone()
        }
    }

    /// Rejects unknown keys and malformed values without fitting.
    pub fn validate(&self) -> Result<()> {
        let allowed = self.family.allowed_keys();
        if let Some((k, v)) = self
            .params
            .iter()
            .find(|(k, _)| !allowed.contains(&k.as_str()))
        {
            return Err(invalid(k, v));
        }
        match self.family {
            Family::Linear => Ok(()),
            Family::RandomForest => self.forest_params().and_then(|p| p.tree.validate()),
            Family::AdaBoostR2 => self.boost_params().and_then(|p| p.base.validate()),
            Family::Svr => {
                let p = self.svr_params()?;
                if p.c <= 0.0 {
                    return Err(invalid("C", &ParamValue::Float(p.c)));
                }
                if p.epsilon < 0.0 {
                    return Err(invalid("epsilon", &ParamValue::Float(p.epsilon)));
                }
                Ok(())
            }
        }
    }

    fn tree_params(&self, default_depth: Option<usize>) -> Result<TreeParams> {
        let p = &self.params;
        Ok(TreeParams {
            max_depth: get_opt_usize(p, "max_depth", default_depth)?,
            min_samples_split: get_usize(p, "min_samples_split", 2)?,
            min_samples_leaf: get_usize(p, "min_samples_leaf", 1)?,
            max_features: get_max_features(p, "max_features")?,
        })
    }

    pub fn forest_params(&self) -> Result<ForestParams> {
        Ok(ForestParams {
            n_estimators: get_usize(&self.params, "n_estimators", 100)?,
            tree: self.tree_params(None)?,
            bootstrap: get_bool(&self.params, "bootstrap", true)?,
        })
    }

    pub fn boost_params(&self) -> Result<BoostParams> {
        Ok(BoostParams {
            n_estimators: get_usize(&self.params, "n_estimators", 50)?,
            learning_rate: get_f64(&self.params, "learning_rate", 1.0)?,
            base: self.tree_params(Some(1))?,
        })
    }

    pub fn svr_params(&self) -> Result<SvrParams> {
        let d = SvrParams::default();
        Ok(SvrParams {
            c: get_f64(&self.params, "C", d.c)?,
            epsilon: get_f64(&self.params, "epsilon", d.epsilon)?,
            max_iter: get_usize(&self.params, "max_iter", d.max_iter)?,
            ..d
        })
    }

    pub fn fit(&self, x: &[Vec<f64>], y: &[f64]) -> Result<Model> {
        self.validate()?;
        Ok(match self.family {
            Family::Linear => Model::Linear(LinearModel::fit(x, y)?),
            Family::RandomForest => {
                Model::Forest(RandomForest::fit(x, y, &self.forest_params()?, self.seed)?)
            }
            Family::AdaBoostR2 => {
                Model::Boost(AdaBoostR2::fit(x, y, &self.boost_params()?, self.seed)?)
            }
            Family::Svr => Model::Svr(LinearSvr::fit(x, y, &self.svr_params()?)?),
        })
    }

    /// Standardizes predictors on `x` before fitting; the returned model
    /// accepts raw rows.
    pub fn fit_scaled(&self, x: &[Vec<f64>], y: &[f64]) -> Result<ScaledModel> {
        let scaler = Scaler::fit(x)?;
        let model = self.fit(&scaler.transform(x), y)?;
        Ok(ScaledModel { scaler, model })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Model {
    Linear(LinearModel),
    Forest(RandomForest),
    Boost(AdaBoostR2),
    Svr(LinearSvr),
}

macro_rules! inherent_regressor {
    ($($t:ty),*) => {
        $(impl Regressor for $t {
            fn predict_row(&self, row: &[f64]) -> f64 {
                <$t>::predict_row(self, row)
            }
        })*
    };
}

inherent_regressor!(
    LinearModel,
    RandomForest,
    AdaBoostR2,
    LinearSvr,
    crate::tree::RegressionTree
);

impl Regressor for Model {
    fn predict_row(&self, row: &[f64]) -> f64 {
        match self {
            Model::Linear(m) => m.predict_row(row),
            Model::Forest(m) => m.predict_row(row),
            Model::Boost(m) => m.predict_row(row),
            Model::Svr(m) => m.predict_row(row),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledModel {
    pub scaler: Scaler,
    pub model: Model,
}

impl Regressor for ScaledModel {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self.model.predict_row(&self.scaler.transform_row(row))
    }
}

impl<F: Fn(&[f64]) -> f64> Regressor for F {
    fn predict_row(&self, row: &[f64]) -> f64 {
        self(row)
    }
}
