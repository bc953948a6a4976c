//! Batch pipeline over free-association responses and word norms: builds
//! pairwise graphs and hypergraphs, aggregates norms over word contexts,
//! evaluates regressors, explains them and tests compartmentalization.

pub mod cli;
pub mod config;
pub mod figures;
pub mod logging;
pub mod pipeline;
pub mod report;

pub use config::{ConfigLayer, RunConfig, Seeds, ShapOptions};
pub use pipeline::{compare_strategies, run_pipeline, RunManifest, RunStatus};
pub use report::{ComparisonTable, MetricsReport};
