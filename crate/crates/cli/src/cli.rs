//! Command-line flags. Each flag mirrors a config key and overrides it.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigLayer, OneOrMany, RunConfig, SeedsLayer, ShapLayer, OUTPUT_DIR_ENV};
use crate::pipeline::{compare_strategies, run_pipeline};

#[derive(Debug, Parser)]
#[command(
    name = "hyperlex",
    version,
    about = "Predict word norms from association networks and hypergraphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write reports under the output directory.
    Run(RunArgs),
    /// Run over two or more strategies and print the comparison table.
    Compare(RunArgs),
    /// Print the resolved configuration as TOML without running anything.
    Config(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file of config keys; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Free-association responses (cue, R1, R2, R3); `.csv` is comma-separated, anything else tab-separated.
    #[arg(long)]
    pub responses: Option<PathBuf>,
    /// Norm files joined on `word`; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    pub norms: Vec<PathBuf>,
    /// r1, r123, chain or clique.
    #[arg(long)]
    pub construction: Option<String>,
    /// Comma-separated subset of non-network, ego, louvain, eva, lemon, hypergraph.
    #[arg(long, alias = "strategies")]
    pub strategy: Option<String>,
    /// Exclude each word from its own contexts.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub gap: Option<bool>,
    /// Norm to predict, e.g. concreteness or aoa.
    #[arg(long)]
    pub target: Option<String>,
    /// Comma-separated families (linear, rf, adaboost, svr) or `all`.
    #[arg(long, alias = "models")]
    pub model: Option<String>,
    /// Cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,
    /// Grid-search hyperparameters; `--tune=false` uses family defaults.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub tune: Option<bool>,
    /// Also report nested cross-validation.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub nested: Option<bool>,
    /// Inner folds of nested cross-validation.
    #[arg(long)]
    pub inner_folds: Option<usize>,
    /// EVA weight of purity against modularity, in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Modularity resolution for Louvain and EVA.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Quantile bins per feature for EVA labels.
    #[arg(long)]
    pub eva_bins: Option<usize>,
    /// Largest community Lemon may grow.
    #[arg(long)]
    pub lemon_max_size: Option<usize>,
    /// Collapse hyperedges with identical word sets.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub dedup: Option<bool>,
    /// Keep the aggregated target among the predictors (label leakage; ablation only).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_target: Option<bool>,
    /// Seed for fold assignment and the attribution split.
    #[arg(long)]
    pub split_seed: Option<u64>,
    /// Seed for model fitting and community detection.
    #[arg(long)]
    pub model_seed: Option<u64>,
    /// Seed for the shuffled null ensemble.
    #[arg(long)]
    pub null_seed: Option<u64>,
    /// Shuffles in the compartmentalization null.
    #[arg(long)]
    pub null_permutations: Option<usize>,
    /// Comma-separated norms tested for compartmentalization.
    #[arg(long)]
    pub compartment_features: Option<String>,
    /// Also write per-context moments of every shuffle.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub emit_null_moments: Option<bool>,
    /// Compute Shapley attributions.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub shap: Option<bool>,
    /// Held-out fraction explained by Shapley attribution.
    #[arg(long)]
    pub shap_test_fraction: Option<f64>,
    /// Background rows averaged per coalition.
    #[arg(long)]
    pub shap_background: Option<usize>,
    /// Explained rows per model; 0 explains all test rows.
    #[arg(long)]
    pub shap_max_instances: Option<usize>,
    /// Write SVG scatter plots.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub figures: Option<bool>,
    /// Directory receiving every report.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
}

impl RunArgs {
    pub fn to_layer(&self) -> ConfigLayer {
        let seeds =
            (self.split_seed.is_some() || self.model_seed.is_some() || self.null_seed.is_some())
                .then_some(SeedsLayer {
                    split: self.split_seed,
                    model: self.model_seed,
                    null: self.null_seed,
                });
        let shap = [
            self.shap_test_fraction.is_some(),
            self.shap_background.is_some(),
            self.shap_max_instances.is_some(),
            self.shap.is_some(),
        ]
        .contains(&true)
        .then_some(ShapLayer {
            enabled: self.shap,
            test_fraction: self.shap_test_fraction,
            background_size: self.shap_background,
            max_instances: self.shap_max_instances,
        });
        ConfigLayer {
            responses: self.responses.clone(),
            norms: (!self.norms.is_empty()).then(|| self.norms.clone()),
            construction: self.construction.clone(),
            strategies: self.strategy.clone().map(OneOrMany::One),
            gap: self.gap,
            target: self.target.clone(),
            models: self.model.clone().map(OneOrMany::One),
            folds: self.folds,
            tune: self.tune,
            nested: self.nested,
            inner_folds: self.inner_folds,
            alpha: self.alpha,
            gamma: self.gamma,
            eva_bins: self.eva_bins,
            lemon_max_size: self.lemon_max_size,
            dedup: self.dedup,
            include_target: self.include_target,
            seeds,
            null_permutations: self.null_permutations,
            compartment_features: self.compartment_features.clone().map(OneOrMany::One),
            emit_null_moments: self.emit_null_moments,
            shap,
            figures: self.figures,
            output_dir: self.output_dir.clone(),
        }
    }

    /// Defaults, then the config file, then flags (the output directory flag
    /// also reads its environment variable).
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigLayer::from_file(p)?,
            None => ConfigLayer::default(),
        };
        file.overlay(self.to_layer()).resolve()
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let manifest = run_pipeline(&args.resolve()?)?;
            for r in &manifest.results {
                println!(
                    "{}\t{}\tr2 {:.4} (se {:.4})\trmse {:.4} (se {:.4})",
                    r.strategy, r.family, r.r2_mean, r.r2_se, r.rmse_mean, r.rmse_se
                );
            }
            println!(
                "{} artifacts, {} warnings, output in {}",
                manifest.artifacts.len(),
                manifest.warnings.len(),
                manifest.config.output_dir.display()
            );
        }
        Command::Compare(args) => {
            let (_, table) = compare_strategies(&args.resolve()?)?;
            print!("{}", table.to_markdown());
        }
        Command::Config(args) => print!("{}", args.resolve()?.to_toml()?),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn flag_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_map_onto_config_keys() {
        let cli = Cli::try_parse_from([
            "hyperlex",
            "config",
            "--responses",
            "r.tsv",
            "--norms",
            "a.csv,b.csv",
            "--strategy",
            "ego,hypergraph",
            "--gap",
            "--model",
            "all",
            "--null-seed",
            "4",
            "--shap=false",
            "--output-dir",
            "/tmp/x",
        ])
        .unwrap();
        let Command::Config(args) = cli.command else {
            panic!()
        };
        let c = args.resolve().unwrap();
        assert_eq!(c.norms.len(), 2);
        assert_eq!(c.strategies.len(), 2);
        assert!(c.gap && !c.shap.enabled);
        assert_eq!(c.models.len(), 4);
        assert_eq!(c.seeds.null, 4);
        assert_eq!(c.output_dir, PathBuf::from("/tmp/x"));
    }
}
