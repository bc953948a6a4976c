//! End-to-end run: ingest, structures, communities, aggregation, model
//! selection, attribution, compartmentalization and figures.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use hyperlex::aggregate::{
    build_feature_matrix, ContextSet, FeatureMatrix, Strategy, StrategyKind,
};
use hyperlex::community::{
    eva, lemon_cover, louvain, BinnedAttributes, Cover, LemonParams, Partition,
};
use hyperlex::compartments::{
    context_moments, ego_contexts, extremes_gap_statistic, hyperedge_contexts,
    null_shuffle_moments, ContextMoments, ExtremesGap,
};
use hyperlex::lexicon::{
    file_digest, intersect_vocabulary, parse_norms, parse_responses, FilteredDataset, NormStats,
    ParseStats, ResponseFormat, SourceDigest,
};
use hyperlex::network::{build_hypergraph, build_pairwise};
use hyperlex::{FeatureName, Hypergraph, PairwiseGraph};
use hyperlex_learn::cv::write_predictions_csv;
use hyperlex_learn::residuals::{residual_report, write_residuals_csv, ResidualPoint};
use hyperlex_learn::{
    default_grid, grid_search, nested_cross_validate, shap_summary, Dataset, Family, Grid,
    PredictionRecord, ShapConfig, ShapSummary,
};

use crate::config::RunConfig;
use crate::figures::{Coloring, ScatterPlot, Series};
use crate::logging::{self, WarningCapture};
use crate::report::{
    write_leaderboard_csv, ComparisonRow, ComparisonTable, MetricsReport, MomentsCsv,
    MomentsSource, NestedReport,
};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    /// path relative to the output directory, `/`-separated
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub responses: ParseStats,
    pub norms: NormStats,
    pub vocabulary: usize,
    pub response_rows: usize,
    pub graph_nodes: usize,
    pub graph_edges: usize,
    pub hypergraph_nodes: usize,
    pub hyperedges: usize,
    pub louvain_communities: Option<usize>,
    pub eva_communities: Option<usize>,
    pub lemon_communities: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompartmentSummary {
    pub structure: String,
    pub feature: FeatureName,
    pub contexts: usize,
    pub statistic: Option<f64>,
    pub z: Option<f64>,
    pub within_null_95: Option<bool>,
    /// why no statistic was computed
    pub note: Option<String>,
}

/// Record of one run. Every file written under the output directory other
/// than the manifest itself appears in `artifacts`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub status: RunStatus,
    pub error: Option<String>,
    pub config: RunConfig,
    pub inputs: Vec<SourceDigest>,
    pub dataset: Option<DatasetSummary>,
    pub timings: Vec<StageTiming>,
    pub artifacts: Vec<Artifact>,
    pub results: Vec<ComparisonRow>,
    pub compartments: Vec<CompartmentSummary>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn result(&self, strategy: Strategy, family: Family) -> Option<&ComparisonRow> {
        let tag = strategy.tag();
        self.results
            .iter()
            .find(|r| r.strategy == tag && r.family == family)
    }

    pub fn compartment(
        &self,
        structure: &str,
        feature: FeatureName,
    ) -> Option<&CompartmentSummary> {
        self.compartments
            .iter()
            .find(|c| c.structure == structure && c.feature == feature)
    }
}

/// Runs every stage in order and writes the manifest. On failure the
/// manifest is still written, with status `failed` and the files emitted so
/// far, and the error is returned.
pub fn run_pipeline(config: &RunConfig) -> Result<RunManifest> {
    config.validate().context("invalid config")?;
    logging::install("warn");
    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating output directory {}", config.output_dir.display()))?;
    let capture = WarningCapture::start();
    let mut run = Run::new(config);
    let outcome = run.execute();
    let mut manifest = run.manifest;
    manifest.warnings = capture.finish();
    if let Err(e) = &outcome {
        manifest.status = RunStatus::Failed;
        manifest.error = Some(format!("{e:#}"));
    }
    let path = config.output_dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    match outcome {
        Ok(()) => Ok(manifest),
        Err(e) => Err(e.context(format!(
            "run failed; partial manifest at {}",
            path.display()
        ))),
    }
}

/// Runs the pipeline over at least two strategies and returns the
/// strategy-by-family table alongside the manifest.
pub fn compare_strategies(config: &RunConfig) -> Result<(RunManifest, ComparisonTable)> {
    ensure!(
        config.strategies.len() >= 2,
        "comparison needs at least two strategies, got {}",
        config.strategies.len()
    );
    let manifest = run_pipeline(config)?;
    let table = comparison_table(config, &manifest.results);
    Ok((manifest, table))
}

fn comparison_table(config: &RunConfig, results: &[ComparisonRow]) -> ComparisonTable {
    ComparisonTable {
        target: config.target,
        strategies: config
            .strategies
            .iter()
            .map(|&k| Strategy::new(k, config.gap))
            .collect(),
        families: config.models.clone(),
        rows: results.to_vec(),
    }
}

/// Responses are comma-separated when the file ends in `.csv`, otherwise tab-separated.
pub fn response_format_for(path: &Path) -> ResponseFormat {
    let csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    ResponseFormat {
        delimiter: if csv { b',' } else { b'\t' },
        ..ResponseFormat::default()
    }
}

struct Structures {
    graph: PairwiseGraph,
    hypergraph: Hypergraph,
    louvain: Option<Partition>,
    eva: Option<Partition>,
    lemon: Option<Cover>,
}

struct Run<'a> {
    cfg: &'a RunConfig,
    manifest: RunManifest,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig) -> Self {
        Run {
            cfg,
            manifest: RunManifest {
                status: RunStatus::Complete,
                error: None,
                config: cfg.clone(),
                inputs: Vec::new(),
                dataset: None,
                timings: Vec::new(),
                artifacts: Vec::new(),
                results: Vec::new(),
                compartments: Vec::new(),
                warnings: Vec::new(),
            },
        }
    }

    fn execute(&mut self) -> Result<()> {
        let data = self.stage("ingest", |r| r.ingest())?;
        let mut structures = self.stage("structures", |r| r.structures(&data))?;
        self.stage("communities", |r| r.communities(&data, &mut structures))?;
        let matrices = self.stage("aggregate", |r| r.aggregate(&data, &structures))?;
        self.stage("models", |r| r.models(&matrices))?;
        self.stage("compartments", |r| r.compartments(&data, &structures))?;
        if self.cfg.strategies.len() >= 2 {
            let table = comparison_table(self.cfg, &self.manifest.results);
            self.emit("comparison.md", table.to_markdown().into_bytes())?;
            self.emit_with("comparison.csv", |w| table.write_csv(w))?;
        }
        Ok(())
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        log::info!("stage {name}");
        let start = Instant::now();
        let out = f(self).with_context(|| format!("stage `{name}`"));
        self.manifest.timings.push(StageTiming {
            stage: name.into(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    fn emit(&mut self, rel: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.cfg.output_dir.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.artifacts.push(Artifact {
            path: rel.to_string(),
            bytes: bytes.len() as u64,
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }

    fn emit_with<E>(
        &mut self,
        rel: &str,
        write: impl FnOnce(&mut Vec<u8>) -> std::result::Result<(), E>,
    ) -> Result<()>
    where
        anyhow::Error: From<E>,
    {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.emit(rel, buf)
    }

    fn emit_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(rel, text.into_bytes())
    }

    fn ingest(&mut self) -> Result<(FilteredDataset, DatasetSummary)> {
        let cfg = self.cfg;
        self.manifest.inputs.push(file_digest(&cfg.responses)?);
        for p in &cfg.norms {
            self.manifest.inputs.push(file_digest(p)?);
        }
        let (responses, response_stats) =
            parse_responses(&cfg.responses, &response_format_for(&cfg.responses))?;
        let (lexicon, norm_stats) = parse_norms(&cfg.norms)?;
        let mut data = intersect_vocabulary(&responses, &lexicon)?;
        data.provenance = self.manifest.inputs.clone();
        log::info!(
            "vocabulary {} words over {} response rows",
            data.vocabulary_size(),
            data.responses.rows.len()
        );
        self.emit_with("structures/responses.tsv", |w| data.responses.write_tsv(w))?;
        let summary = DatasetSummary {
            responses: response_stats,
            norms: norm_stats,
            vocabulary: data.vocabulary_size(),
            response_rows: data.responses.rows.len(),
            graph_nodes: 0,
            graph_edges: 0,
            hypergraph_nodes: 0,
            hyperedges: 0,
            louvain_communities: None,
            eva_communities: None,
            lemon_communities: None,
        };
        Ok((data, summary))
    }

    fn structures(
        &mut self,
        (data, summary): &(FilteredDataset, DatasetSummary),
    ) -> Result<Structures> {
        let graph = build_pairwise(&data.responses, self.cfg.construction)?;
        let hypergraph = build_hypergraph(&data.responses, self.cfg.dedup)?;
        log::info!(
            "{} graph: {} nodes, {} edges; hypergraph: {} nodes, {} hyperedges",
            self.cfg.construction,
            graph.node_count(),
            graph.edge_count(),
            hypergraph.node_count(),
            hypergraph.edge_count()
        );
        self.emit_with(
            &format!("structures/graph_{}.tsv", self.cfg.construction),
            |w| graph.write_edge_list(w),
        )?;
        self.emit_with("structures/hyperedges.txt", |w| {
            hypergraph.write_hyperedges(w)
        })?;
        self.manifest.dataset = Some(DatasetSummary {
            graph_nodes: graph.node_count(),
            graph_edges: graph.edge_count(),
            hypergraph_nodes: hypergraph.node_count(),
            hyperedges: hypergraph.edge_count(),
            ..summary.clone()
        });
        Ok(Structures {
            graph,
            hypergraph,
            louvain: None,
            eva: None,
            lemon: None,
        })
    }

    fn communities(
        &mut self,
        (data, _): &(FilteredDataset, DatasetSummary),
        s: &mut Structures,
    ) -> Result<()> {
        let cfg = self.cfg;
        let wants = |k| cfg.strategies.contains(&k);
        if wants(StrategyKind::LouvainCommunity) {
            let run = louvain(&s.graph, cfg.gamma, cfg.seeds.model)?;
            log::info!(
                "louvain: {} communities, objective {:.4}",
                run.partition.n_communities(),
                run.objective
            );
            self.emit_with("structures/louvain.csv", |w| {
                run.partition.write_csv(&s.graph, w)
            })?;
            s.louvain = Some(run.partition);
        }
        if wants(StrategyKind::EvaCommunity) {
            let attrs = BinnedAttributes::quantile(&data.lexicon, &FeatureName::ALL, cfg.eva_bins)?;
            let run = eva(&s.graph, &attrs, cfg.alpha, cfg.gamma, cfg.seeds.model)?;
            log::info!(
                "eva: {} communities, objective {:.4}",
                run.partition.n_communities(),
                run.objective
            );
            self.emit_with("structures/eva.csv", |w| {
                run.partition.write_csv(&s.graph, w)
            })?;
            s.eva = Some(run.partition);
        }
        if wants(StrategyKind::LemonCover) {
            let params = LemonParams {
                max_size: cfg.lemon_max_size,
                ..LemonParams::default()
            };
            let cover = lemon_cover(&s.graph, &params)?;
            log::info!("lemon: {} local communities", cover.len());
            self.emit_with("structures/lemon.txt", |w| cover.write_lines(&s.graph, w))?;
            s.lemon = Some(cover);
        }
        if let Some(d) = self.manifest.dataset.as_mut() {
            d.louvain_communities = s.louvain.as_ref().map(Partition::n_communities);
            d.eva_communities = s.eva.as_ref().map(Partition::n_communities);
            d.lemon_communities = s.lemon.as_ref().map(Cover::len);
        }
        Ok(())
    }

    fn aggregate(
        &mut self,
        (data, _): &(FilteredDataset, DatasetSummary),
        s: &Structures,
    ) -> Result<Vec<FeatureMatrix>> {
        let lex = &data.lexicon;
        let mut out = Vec::with_capacity(self.cfg.strategies.len());
        for &kind in &self.cfg.strategies {
            let contexts = match kind {
                StrategyKind::NonNetwork => ContextSet::empty(lex),
                StrategyKind::EgoNetwork => ContextSet::ego(&s.graph, lex)?,
                StrategyKind::LouvainCommunity => {
                    ContextSet::partition(&s.graph, need(&s.louvain)?, lex)?
                }
                StrategyKind::EvaCommunity => ContextSet::partition(&s.graph, need(&s.eva)?, lex)?,
                StrategyKind::LemonCover => ContextSet::cover(&s.graph, need(&s.lemon)?, lex)?,
                StrategyKind::HypergraphStar => ContextSet::hypergraph(&s.hypergraph, lex)?,
            };
            let strategy = Strategy::new(kind, self.cfg.gap);
            let m = build_feature_matrix(
                lex,
                &contexts,
                strategy,
                self.cfg.target,
                self.cfg.include_target,
            )?;
            self.emit_with(&format!("features/{}.csv", strategy.tag()), |w| {
                m.write_csv(w)
            })?;
            out.push(m);
        }
        Ok(out)
    }

    fn models(&mut self, matrices: &[FeatureMatrix]) -> Result<()> {
        let cfg = self.cfg;
        for m in matrices {
            let ds = Dataset::from_matrix(m)?;
            for &family in &cfg.models {
                let stem = format!("{}__{}", m.strategy.tag(), family);
                let grid = if cfg.tune {
                    default_grid(family)
                } else {
                    Grid::new()
                };
                let search = grid_search(
                    &ds,
                    family,
                    &grid,
                    cfg.folds,
                    cfg.seeds.split,
                    cfg.seeds.model,
                )?;
                let metrics = &search.best_cv.metrics;
                log::info!(
                    "{stem}: r2 {:.4} (se {:.4}), rmse {:.4} over {} grid points",
                    metrics.r2_mean,
                    metrics.r2_se,
                    metrics.rmse_mean,
                    search.leaderboard.len()
                );
                let nested = if cfg.nested {
                    let n = nested_cross_validate(
                        &ds,
                        family,
                        &grid,
                        cfg.folds,
                        cfg.inner_folds,
                        cfg.seeds.split,
                        cfg.seeds.model,
                    )?;
                    Some(NestedReport {
                        k_outer: cfg.folds,
                        k_inner: cfg.inner_folds,
                        rmse_mean: n.metrics.rmse_mean,
                        rmse_se: n.metrics.rmse_se,
                        r2_mean: n.metrics.r2_mean,
                        r2_se: n.metrics.r2_se,
                        chosen: n.chosen,
                    })
                } else {
                    None
                };
                let report = MetricsReport::new(
                    m.strategy,
                    search.best.clone(),
                    metrics,
                    search.leaderboard.len(),
                    nested,
                    cfg,
                );
                self.emit_json(&format!("models/{stem}.metrics.json"), &report)?;
                self.emit_with(&format!("models/{stem}.predictions.csv"), |w| {
                    write_predictions_csv(&search.best_cv.predictions, w)
                })?;
                self.emit_with(&format!("models/{stem}.leaderboard.csv"), |w| {
                    write_leaderboard_csv(&search.leaderboard, w)
                })?;
                self.manifest.results.push(ComparisonRow {
                    strategy: m.strategy.tag(),
                    family,
                    rmse_mean: metrics.rmse_mean,
                    rmse_se: metrics.rmse_se,
                    r2_mean: metrics.r2_mean,
                    r2_se: metrics.r2_se,
                });
                self.explain(&stem, &ds, &search.best, &search.best_cv.predictions)?;
            }
        }
        Ok(())
    }

    fn explain(
        &mut self,
        stem: &str,
        ds: &Dataset,
        spec: &hyperlex_learn::ModelSpec,
        predictions: &[PredictionRecord],
    ) -> Result<()> {
        let cfg = self.cfg;
        let shap = if cfg.shap.enabled {
            let sc = ShapConfig {
                test_fraction: cfg.shap.test_fraction,
                background_size: cfg.shap.background_size,
                max_instances: (cfg.shap.max_instances > 0).then_some(cfg.shap.max_instances),
                seed: cfg.seeds.split,
            };
            let summary = shap_summary(spec, ds, &sc)?;
            self.emit_with(&format!("explain/{stem}.shap.csv"), |w| {
                summary.write_values_csv(w)
            })?;
            self.emit_with(&format!("explain/{stem}.shap_summary.csv"), |w| {
                summary.write_summary_csv(w)
            })?;
            Some(summary)
        } else {
            None
        };
        if ds.n_features() < 2 {
            return Ok(());
        }
        let (fx, fy) = top_pair(ds, shap.as_ref());
        let points = residual_report(predictions, ds, &[(fx, fy)]);
        self.emit_with(&format!("explain/{stem}.residuals.csv"), |w| {
            write_residuals_csv(&points, w)
        })?;
        if cfg.figures {
            let values = ScatterPlot {
                title: format!("{stem}: {} by predictor pair", cfg.target),
                x_label: ds.feature_names[fx].clone(),
                y_label: ds.feature_names[fy].clone(),
                series: vec![Series {
                    name: cfg.target.to_string(),
                    points: ds.x.iter().map(|r| (r[fx], r[fy])).collect(),
                    coloring: Coloring::Sequential(ds.y.clone()),
                }],
            };
            self.emit(
                &format!("figures/{stem}.values.svg"),
                values.to_svg().into_bytes(),
            )?;
            self.emit(
                &format!("figures/{stem}.residuals.svg"),
                residual_plot(stem, &points).to_svg().into_bytes(),
            )?;
        }
        Ok(())
    }

    fn compartments(
        &mut self,
        (data, _): &(FilteredDataset, DatasetSummary),
        s: &Structures,
    ) -> Result<()> {
        let cfg = self.cfg;
        let lex = &data.lexicon;
        let structures = [
            ("hypergraph", hyperedge_contexts(&s.hypergraph, lex)?),
            ("ego", ego_contexts(&s.graph, lex)?),
        ];
        let mut csv = MomentsCsv::new(Vec::new())?;
        let mut gaps: Vec<GapRecord> = Vec::new();
        let mut figures = Vec::new();
        for (structure, contexts) in &structures {
            for &feature in &cfg.compartment_features {
                let (empirical, skipped) = context_moments(contexts, &lex.column(feature), feature);
                if skipped > 0 {
                    log::debug!("{structure}/{feature}: {skipped} contexts below size 2 skipped");
                }
                let null = null_shuffle_moments(
                    contexts,
                    lex,
                    feature,
                    cfg.null_permutations,
                    cfg.seeds.null,
                )?;
                csv.write(structure, MomentsSource::Empirical, &empirical)?;
                if cfg.emit_null_moments {
                    for (p, (_, m)) in null.iter().enumerate() {
                        csv.write(structure, MomentsSource::Permutation(p), m)?;
                    }
                }
                let ensemble: Vec<Vec<ContextMoments>> =
                    null.iter().map(|(_, m)| m.clone()).collect();
                let (gap, note) = match extremes_gap_statistic(&empirical, &ensemble, feature) {
                    Ok(g) => (Some(g), None),
                    Err(e) => {
                        log::warn!("{structure}/{feature}: no extremes statistic: {e}");
                        (None, Some(e.to_string()))
                    }
                };
                self.manifest.compartments.push(CompartmentSummary {
                    structure: structure.to_string(),
                    feature,
                    contexts: empirical.len(),
                    statistic: gap.as_ref().map(|g| g.statistic),
                    z: gap.as_ref().map(|g| g.z),
                    within_null_95: gap.as_ref().map(|g| g.within_null_95),
                    note: note.clone(),
                });
                gaps.push(GapRecord {
                    structure: structure.to_string(),
                    feature,
                    contexts: empirical.len(),
                    permutations: cfg.null_permutations,
                    null_seed: cfg.seeds.null,
                    result: gap,
                    note,
                });
                if cfg.figures {
                    let first_null = null.first().map(|(_, m)| m.as_slice()).unwrap_or(&[]);
                    figures.push((
                        format!("figures/compartments_{structure}_{feature}.svg"),
                        moments_plot(structure, feature, &empirical, first_null),
                    ));
                }
            }
        }
        let buf = csv.finish()?;
        self.emit("compartments/moments.csv", buf)?;
        self.emit_json(
            "compartments/extremes_gap.json",
            &GapReport {
                records: &gaps,
                config: cfg,
            },
        )?;
        for (path, plot) in figures {
            self.emit(&path, plot.to_svg().into_bytes())?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct GapRecord {
    structure: String,
    feature: FeatureName,
    contexts: usize,
    permutations: usize,
    null_seed: u64,
    result: Option<ExtremesGap>,
    note: Option<String>,
}

#[derive(Serialize)]
struct GapReport<'a> {
    records: &'a [GapRecord],
    config: &'a RunConfig,
}

fn need<T>(v: &Option<T>) -> Result<&T> {
    match v {
        Some(v) => Ok(v),
        None => bail!("community structure was not computed"),
    }
}

/// The two most important predictors by mean |attribution|, otherwise the
/// first two columns.
fn top_pair(ds: &Dataset, shap: Option<&ShapSummary>) -> (usize, usize) {
    let ranked: Vec<usize> = shap
        .map(|s| {
            s.importance
                .iter()
                .filter_map(|f| ds.feature_names.iter().position(|n| *n == f.feature))
                .collect()
        })
        .unwrap_or_default();
    match ranked.as_slice() {
        [a, b, ..] => (*a, *b),
        _ => (0, 1),
    }
}

fn residual_plot(stem: &str, points: &[ResidualPoint]) -> ScatterPlot {
    let (x_label, y_label) = points
        .first()
        .map(|p| (p.x_feature.clone(), p.y_feature.clone()))
        .unwrap_or_default();
    ScatterPlot {
        title: format!("{stem}: cross-validated residuals"),
        x_label,
        y_label,
        series: vec![Series {
            name: "residual".into(),
            points: points.iter().map(|p| (p.x, p.y)).collect(),
            coloring: Coloring::Diverging(points.iter().map(|p| p.residual).collect()),
        }],
    }
}

fn moments_plot(
    structure: &str,
    feature: FeatureName,
    empirical: &[ContextMoments],
    null: &[ContextMoments],
) -> ScatterPlot {
    let pts = |m: &[ContextMoments]| m.iter().map(|c| (c.mean, c.std)).collect();
    ScatterPlot {
        title: format!("{structure} contexts: {feature} mean vs std"),
        x_label: format!("context mean {feature}"),
        y_label: format!("context std {feature}"),
        series: vec![
            Series {
                name: "shuffled".into(),
                points: pts(null),
                coloring: Coloring::Fixed("#bbbbbb".into()),
            },
            Series {
                name: "empirical".into(),
                points: pts(empirical),
                coloring: Coloring::Fixed("#b2182b".into()),
            },
        ],
    }
}
