//! Report payloads and their serializations.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use hyperlex::aggregate::{Strategy, StrategyKind};
use hyperlex::compartments::ContextMoments;
use hyperlex::FeatureName;
use hyperlex_learn::cv::FoldMetrics;
use hyperlex_learn::grid::LeaderboardEntry;
use hyperlex_learn::model::params_label;
use hyperlex_learn::{Family, ModelSpec, Params, RegressionMetrics};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedReport {
    pub k_outer: usize,
    pub k_inner: usize,
    pub rmse_mean: f64,
    pub rmse_se: f64,
    pub r2_mean: f64,
    pub r2_se: f64,
    /// hyperparameters chosen by the inner search of each outer fold
    pub chosen: Vec<Params>,
}

/// Cross-validated scores of the selected specification for one
/// (strategy, family) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub strategy: String,
    pub target: FeatureName,
    pub family: Family,
    pub spec: ModelSpec,
    pub k: usize,
    pub rmse_mean: f64,
    pub rmse_se: f64,
    /// sample standard deviation over folds; `rmse_se` is this over `sqrt(k)`
    pub rmse_std: f64,
    pub r2_mean: f64,
    pub r2_se: f64,
    pub r2_std: f64,
    pub per_fold: Vec<FoldMetrics>,
    pub grid_points: usize,
    pub nested: Option<NestedReport>,
    pub config: RunConfig,
}

impl MetricsReport {
    pub fn new(
        strategy: Strategy,
        spec: ModelSpec,
        metrics: &RegressionMetrics,
        grid_points: usize,
        nested: Option<NestedReport>,
        config: &RunConfig,
    ) -> Self {
        MetricsReport {
            strategy: strategy.tag(),
            target: config.target,
            family: spec.family,
            spec,
            k: metrics.k,
            rmse_mean: metrics.rmse_mean,
            rmse_se: metrics.rmse_se,
            rmse_std: metrics.rmse_std,
            r2_mean: metrics.r2_mean,
            r2_se: metrics.r2_se,
            r2_std: metrics.r2_std,
            per_fold: metrics.per_fold.clone(),
            grid_points,
            nested,
            config: config.clone(),
        }
    }
}

pub fn write_leaderboard_csv<W: Write>(entries: &[LeaderboardEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "rank",
        "grid_index",
        "params",
        "rmse_mean",
        "rmse_se",
        "r2_mean",
        "r2_se",
    ])?;
    for e in entries {
        w.write_record([
            e.rank.to_string(),
            e.grid_index.to_string(),
            params_label(&e.params),
            e.rmse_mean.to_string(),
            e.rmse_se.to_string(),
            e.r2_mean.to_string(),
            e.r2_se.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Which assignment produced a moments row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentsSource {
    Empirical,
    Permutation(usize),
}

impl MomentsSource {
    fn label(self) -> String {
        match self {
            MomentsSource::Empirical => "empirical".into(),
            MomentsSource::Permutation(p) => p.to_string(),
        }
    }
}

pub struct MomentsCsv<W: Write> {
    w: csv::Writer<W>,
}

impl<W: Write> MomentsCsv<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "structure",
            "context_id",
            "feature",
            "mean",
            "std",
            "size",
            "permutation",
        ])?;
        Ok(MomentsCsv { w })
    }

    pub fn write(
        &mut self,
        structure: &str,
        source: MomentsSource,
        moments: &[ContextMoments],
    ) -> Result<()> {
        let label = source.label();
        for m in moments {
            self.w.write_record([
                structure,
                &m.context_id.to_string(),
                m.feature.as_str(),
                &m.mean.to_string(),
                &m.std.to_string(),
                &m.size.to_string(),
                &label,
            ])?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.w
            .into_inner()
            .map_err(|e| anyhow::anyhow!("flushing moments: {}", e.error()))
    }
}

/// One metrics row per (strategy, family).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub strategy: String,
    pub family: Family,
    pub rmse_mean: f64,
    pub rmse_se: f64,
    pub r2_mean: f64,
    pub r2_se: f64,
}

/// Strategy-by-family comparison. Columns follow the requested strategy
/// order and row groups follow the requested family order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub target: FeatureName,
    pub strategies: Vec<Strategy>,
    pub families: Vec<Family>,
    pub rows: Vec<ComparisonRow>,
}

/// Column heading of a strategy; network-derived pairwise strategies carry
/// a `G:` prefix and gap variants a `-gap` suffix.
pub fn column_label(s: Strategy) -> String {
    let base = match s.kind {
        StrategyKind::NonNetwork => "Non-Net",
        StrategyKind::EgoNetwork => "G: Ego-Net",
        StrategyKind::LouvainCommunity => "G: Louvain",
        StrategyKind::EvaCommunity => "G: EVA",
        StrategyKind::LemonCover => "G: Lemon",
        StrategyKind::HypergraphStar => "Hypergraph",
    };
    if s.gap {
        format!("{base}-gap")
    } else {
        base.to_string()
    }
}

impl ComparisonTable {
    pub fn get(&self, strategy: Strategy, family: Family) -> Option<&ComparisonRow> {
        let tag = strategy.tag();
        self.rows
            .iter()
            .find(|r| r.strategy == tag && r.family == family)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!("Target: {}\n\n| Model | Metric |", self.target);
        for &st in &self.strategies {
            s.push_str(&format!(" {} |", column_label(st)));
        }
        s.push_str("\n|---|---|");
        s.push_str(&"---:|".repeat(self.strategies.len()));
        s.push('\n');
        type Pick = fn(&ComparisonRow) -> f64;
        let lines: [(&str, Pick); 4] = [
            ("RMSE M", |r| r.rmse_mean),
            ("RMSE SE", |r| r.rmse_se),
            ("R² M", |r| r.r2_mean),
            ("R² SE", |r| r.r2_se),
        ];
        for &f in &self.families {
            for (i, (name, pick)) in lines.iter().enumerate() {
                let model = if i == 0 { f.display_name() } else { "" };
                s.push_str(&format!("| {model} | {name} |"));
                for &st in &self.strategies {
                    match self.get(st, f) {
                        Some(r) => s.push_str(&format!(" {:.2} |", pick(r))),
                        None => s.push_str(" - |"),
                    }
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "strategy",
            "family",
            "rmse_mean",
            "rmse_se",
            "r2_mean",
            "r2_se",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.strategy.clone(),
                r.family.as_str().to_string(),
                r.rmse_mean.to_string(),
                r.rmse_se.to_string(),
                r.r2_mean.to_string(),
                r.r2_se.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
