//! Regression models, cross-validated evaluation and Shapley attribution
//! over row-major feature matrices.

pub mod boost;
pub mod cv;
pub mod dataset;
pub mod error;
pub mod forest;
pub mod grid;
pub mod linear;
pub mod metrics;
pub mod model;
pub mod residuals;
pub mod scaler;
pub mod shap;
pub mod svr;
pub mod tree;

pub use cv::{cross_validate, CvResult, PredictionRecord, RegressionMetrics};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use grid::{default_grid, grid_search, nested_cross_validate, Grid, GridSearchResult};
pub use model::{Family, Model, ModelSpec, ParamValue, Params, Regressor, ScaledModel};
pub use shap::{shap_summary, shapley_values, ShapConfig, ShapRecord, ShapSummary};
