//! Run configuration. Values resolve in the order defaults, config file,
//! environment, flags; the last layer that sets a key wins.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use hyperlex::aggregate::StrategyKind;
use hyperlex::{Construction, FeatureName};
use hyperlex_learn::Family;

/// Overrides the output directory of the config file, but not `--output-dir`.
pub const OUTPUT_DIR_ENV: &str = "HYPERLEX_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    /// fold assignment and the attribution train/test split
    pub split: u64,
    /// model fitting and community detection
    pub model: u64,
    /// compartmentalization shuffles
    pub null: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            split: 11,
            model: 23,
            null: 37,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapOptions {
    pub enabled: bool,
    pub test_fraction: f64,
    pub background_size: usize,
    /// explained test rows per model; 0 explains every test row
    pub max_instances: usize,
}

impl Default for ShapOptions {
    fn default() -> Self {
        ShapOptions {
            enabled: true,
            test_fraction: 0.2,
            background_size: 100,
            max_instances: 200,
        }
    }
}

/// Fully resolved and validated run settings. Serializing it and feeding the
/// result back through [`ConfigLayer`] reproduces the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub responses: PathBuf,
    pub norms: Vec<PathBuf>,
    pub construction: Construction,
    pub strategies: Vec<StrategyKind>,
    pub gap: bool,
    pub target: FeatureName,
    pub models: Vec<Family>,
    pub folds: usize,
    /// grid search over the family's default grid; otherwise family defaults
    pub tune: bool,
    pub nested: bool,
    pub inner_folds: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub eva_bins: usize,
    pub lemon_max_size: usize,
    pub dedup: bool,
    /// keep the aggregated target among the predictors (leaks the label; ablation only)
    pub include_target: bool,
    pub seeds: Seeds,
    pub null_permutations: usize,
    pub compartment_features: Vec<FeatureName>,
    /// also write every null permutation's moments, not only the empirical ones
    pub emit_null_moments: bool,
    pub shap: ShapOptions,
    pub figures: bool,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Defaults for everything except the input paths.
    pub fn with_inputs(responses: impl Into<PathBuf>, norms: Vec<PathBuf>) -> Self {
        RunConfig {
            responses: responses.into(),
            norms,
            construction: Construction::R123,
            strategies: vec![StrategyKind::HypergraphStar],
            gap: false,
            target: FeatureName::Concreteness,
            models: vec![Family::RandomForest],
            folds: 10,
            tune: true,
            nested: false,
            inner_folds: 3,
            alpha: 0.8,
            gamma: 1.0,
            eva_bins: 4,
            lemon_max_size: 4,
            dedup: false,
            include_target: false,
            seeds: Seeds::default(),
            null_permutations: 50,
            compartment_features: vec![FeatureName::Aoa, FeatureName::Valence],
            emit_null_moments: false,
            shap: ShapOptions::default(),
            figures: true,
            output_dir: PathBuf::from("hyperlex-out"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            !self.norms.is_empty(),
            "at least one norms file is required"
        );
        ensure!(
            !self.strategies.is_empty(),
            "at least one strategy is required"
        );
        ensure!(
            !self.models.is_empty(),
            "at least one model family is required"
        );
        ensure!(no_repeats(&self.strategies), "strategies must not repeat");
        ensure!(no_repeats(&self.models), "model families must not repeat");
        ensure!(
            self.folds >= 2,
            "folds must be at least 2, got {}",
            self.folds
        );
        ensure!(
            self.inner_folds >= 2,
            "inner_folds must be at least 2, got {}",
            self.inner_folds
        );
        ensure!(
            (0.0..=1.0).contains(&self.alpha),
            "alpha must lie in [0, 1], got {}",
            self.alpha
        );
        ensure!(
            self.gamma > 0.0 && self.gamma.is_finite(),
            "gamma must be positive, got {}",
            self.gamma
        );
        ensure!(
            (2..=255).contains(&self.eva_bins),
            "eva_bins must lie in [2, 255], got {}",
            self.eva_bins
        );
        ensure!(
            self.lemon_max_size >= 3,
            "lemon_max_size must be at least 3, got {}",
            self.lemon_max_size
        );
        ensure!(
            self.null_permutations >= 1,
            "null_permutations must be at least 1"
        );
        let s = &self.shap;
        ensure!(
            s.test_fraction > 0.0 && s.test_fraction < 1.0,
            "shap.test_fraction must lie in (0, 1), got {}",
            s.test_fraction
        );
        ensure!(
            s.background_size >= 1,
            "shap.background_size must be at least 1"
        );
        ensure!(
            no_repeats(&self.compartment_features),
            "compartment features must not repeat"
        );
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing config")
    }
}

fn no_repeats<T: PartialEq>(items: &[T]) -> bool {
    items
        .iter()
        .enumerate()
        .all(|(i, a)| !items[..i].contains(a))
}

/// A list given either as a TOML array or as one comma-separated string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    pub fn items(&self) -> Vec<String> {
        let raw: Vec<&str> = match self {
            OneOrMany::One(s) => s.split(',').collect(),
            OneOrMany::Many(v) => v.iter().flat_map(|s| s.split(',')).collect(),
        };
        raw.into_iter()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedsLayer {
    pub split: Option<u64>,
    pub model: Option<u64>,
    pub null: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapLayer {
    pub enabled: Option<bool>,
    pub test_fraction: Option<f64>,
    pub background_size: Option<usize>,
    pub max_instances: Option<usize>,
}

/// One source of settings. Enumerations stay as text until [`ConfigLayer::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub responses: Option<PathBuf>,
    pub norms: Option<Vec<PathBuf>>,
    pub construction: Option<String>,
    pub strategies: Option<OneOrMany>,
    pub gap: Option<bool>,
    pub target: Option<String>,
    pub models: Option<OneOrMany>,
    pub folds: Option<usize>,
    pub tune: Option<bool>,
    pub nested: Option<bool>,
    pub inner_folds: Option<usize>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub eva_bins: Option<usize>,
    pub lemon_max_size: Option<usize>,
    pub dedup: Option<bool>,
    pub include_target: Option<bool>,
    pub seeds: Option<SeedsLayer>,
    pub null_permutations: Option<usize>,
    pub compartment_features: Option<OneOrMany>,
    pub emit_null_moments: Option<bool>,
    pub shap: Option<ShapLayer>,
    pub figures: Option<bool>,
    pub output_dir: Option<PathBuf>,
}

macro_rules! overlay_fields {
    ($top:ident, $base:ident; $($f:ident),*) => {
        $( $base.$f = $top.$f.or($base.$f); )*
    };
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing config")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut layer = Self::from_toml(&text).with_context(|| format!("in {}", path.display()))?;
        // relative input paths in a config file are relative to the file
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            };
            layer.responses.as_mut().map(fix);
            layer.norms.iter_mut().flatten().for_each(fix);
        }
        Ok(layer)
    }

    /// Layer holding only the output directory from [`OUTPUT_DIR_ENV`].
    pub fn from_env() -> Self {
        ConfigLayer {
            output_dir: std::env::var_os(OUTPUT_DIR_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
            ..ConfigLayer::default()
        }
    }

    /// Keys set in `top` replace keys set here.
    pub fn overlay(mut self, top: ConfigLayer) -> ConfigLayer {
        overlay_fields!(top, self; responses, norms, construction, strategies, gap, target, models,
            folds, tune, nested, inner_folds, alpha, gamma, eva_bins, lemon_max_size, dedup,
            include_target, null_permutations, compartment_features, emit_null_moments, figures,
            output_dir);
        self.seeds = match (self.seeds, top.seeds) {
            (Some(mut base), Some(top)) => {
                overlay_fields!(top, base; split, model, null);
                Some(base)
            }
            (base, top) => top.or(base),
        };
        self.shap = match (self.shap, top.shap) {
            (Some(mut base), Some(top)) => {
                overlay_fields!(top, base; enabled, test_fraction, background_size, max_instances);
                Some(base)
            }
            (base, top) => top.or(base),
        };
        self
    }

    /// Applies the layer over the defaults and validates every value.
    pub fn resolve(self) -> Result<RunConfig> {
        let Some(responses) = self.responses else {
            bail!("missing `responses` input path")
        };
        let norms = self.norms.unwrap_or_default();
        let mut c = RunConfig::with_inputs(responses, norms);
        if let Some(v) = self.construction {
            c.construction = Construction::from_str(&v)?;
        }
        if let Some(v) = self.strategies {
            c.strategies = parse_list(&v, "strategies", |s| Ok(s.parse::<StrategyKind>()?))?;
        }
        if let Some(v) = self.target {
            c.target = v.parse()?;
        }
        if let Some(v) = self.models {
            c.models = parse_models(&v)?;
        }
        if let Some(v) = self.compartment_features {
            c.compartment_features =
                parse_list(
                    &v,
                    "compartment_features",
                    |s| Ok(s.parse::<FeatureName>()?),
                )?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        set!(
            gap,
            folds,
            tune,
            nested,
            inner_folds,
            alpha,
            gamma,
            eva_bins,
            lemon_max_size,
            dedup,
            include_target,
            null_permutations,
            emit_null_moments,
            figures,
            output_dir
        );
        if let Some(s) = self.seeds {
            c.seeds.split = s.split.unwrap_or(c.seeds.split);
            c.seeds.model = s.model.unwrap_or(c.seeds.model);
            c.seeds.null = s.null.unwrap_or(c.seeds.null);
        }
        if let Some(s) = self.shap {
            c.shap.enabled = s.enabled.unwrap_or(c.shap.enabled);
            c.shap.test_fraction = s.test_fraction.unwrap_or(c.shap.test_fraction);
            c.shap.background_size = s.background_size.unwrap_or(c.shap.background_size);
            c.shap.max_instances = s.max_instances.unwrap_or(c.shap.max_instances);
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_list<T>(v: &OneOrMany, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let items = v.items();
    ensure!(!items.is_empty(), "`{key}` must not be empty");
    items
        .iter()
        .map(|s| parse(s).with_context(|| format!("in `{key}`")))
        .collect()
}

fn parse_models(v: &OneOrMany) -> Result<Vec<Family>> {
    let items = v.items();
    if items.len() == 1 && items[0].eq_ignore_ascii_case("all") {
        return Ok(Family::ALL.to_vec());
    }
    parse_list(v, "models", |s| Ok(s.parse::<Family>()?))
}
