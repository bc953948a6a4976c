//! Characteristic feature values: a word's norm as expressed by its
//! structural contexts.
//!
//! Every strategy reduces to a list of context groups per word. The
//! characteristic value is the mean over groups of the within-group mean,
//! with the target word removed from each group when `gap` is set. Words with
//! no usable context fall back to their own value.

use std::fmt;
use std::io::{self, Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::community::{Cover, Partition};
use crate::error::{Error, Result};
use crate::feature::FeatureName;
use crate::lexicon::Lexicon;
use crate::network::{Hypergraph, NodeIndex, PairwiseGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StrategyKind {
    #[serde(rename = "non-network")]
    NonNetwork,
    #[serde(rename = "ego")]
    EgoNetwork,
    #[serde(rename = "louvain")]
    LouvainCommunity,
    #[serde(rename = "eva")]
    EvaCommunity,
    #[serde(rename = "lemon")]
    LemonCover,
    #[serde(rename = "hypergraph")]
    HypergraphStar,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::NonNetwork,
        StrategyKind::EgoNetwork,
        StrategyKind::LouvainCommunity,
        StrategyKind::EvaCommunity,
        StrategyKind::LemonCover,
        StrategyKind::HypergraphStar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::NonNetwork => "non-network",
            StrategyKind::EgoNetwork => "ego",
            StrategyKind::LouvainCommunity => "louvain",
            StrategyKind::EvaCommunity => "eva",
            StrategyKind::LemonCover => "lemon",
            StrategyKind::HypergraphStar => "hypergraph",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let k = match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "non-network" | "nonnetwork" | "none" => StrategyKind::NonNetwork,
            "ego" | "ego-network" => StrategyKind::EgoNetwork,
            "louvain" => StrategyKind::LouvainCommunity,
            "eva" => StrategyKind::EvaCommunity,
            "lemon" => StrategyKind::LemonCover,
            "hypergraph" | "star" => StrategyKind::HypergraphStar,
            _ => {
                return Err(Error::UnknownVariant {
                    kind: "strategy",
                    value: s.to_string(),
                })
            }
        };
        Ok(k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub gap: bool,
}

impl Strategy {
    pub fn new(kind: StrategyKind, gap: bool) -> Self {
        // no context exists for the non-network strategy, so no gap either
        Strategy {
            kind,
            gap: gap && kind != StrategyKind::NonNetwork,
        }
    }

    /// Short tag used as a column suffix, e.g. `hypergraph` or `lemon_gap`.
    pub fn tag(&self) -> String {
        let base = self.kind.as_str().replace('-', "_");
        if self.gap {
            format!("{base}_gap")
        } else {
            base
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag.strip_suffix("_gap") {
            Some(base) => Ok(Strategy::new(base.parse()?, true)),
            None => Ok(Strategy::new(tag.parse()?, false)),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// Context groups per lexicon word, as lexicon indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextSet {
    groups: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Characteristic {
    pub value: f64,
    pub fallback: bool,
}

fn to_lexicon(nodes: &NodeIndex, lexicon: &Lexicon) -> Result<Vec<usize>> {
    nodes
        .words()
        .iter()
        .map(|w| {
            lexicon
                .index_of(w)
                .ok_or_else(|| Error::UnknownWord(w.clone()))
        })
        .collect()
}

impl ContextSet {
    /// No contexts at all; every characteristic is the word's own value.
    pub fn empty(lexicon: &Lexicon) -> Self {
        ContextSet {
            groups: vec![Vec::new(); lexicon.len()],
        }
    }

    /// One group per word: its graph neighbours plus itself.
    pub fn ego(graph: &PairwiseGraph, lexicon: &Lexicon) -> Result<Self> {
        let map = to_lexicon(graph.nodes(), lexicon)?;
        let mut out = Self::empty(lexicon);
        for (v, &w) in map.iter().enumerate() {
            let mut g: Vec<usize> = graph
                .neighbors(v as u32)
                .iter()
                .map(|&u| map[u as usize])
                .collect();
            g.push(w);
            out.groups[w].push(g);
        }
        Ok(out)
    }

    /// One group per word: its community.
    pub fn partition(
        graph: &PairwiseGraph,
        partition: &Partition,
        lexicon: &Lexicon,
    ) -> Result<Self> {
        let map = to_lexicon(graph.nodes(), lexicon)?;
        if partition.assignment().len() != map.len() {
            return Err(Error::InvalidInput("partition does not cover graph".into()));
        }
        let communities: Vec<Vec<usize>> = partition
            .communities()
            .into_iter()
            .map(|c| c.into_iter().map(|v| map[v as usize]).collect())
            .collect();
        let mut out = Self::empty(lexicon);
        for (v, &w) in map.iter().enumerate() {
            let c = partition.community_of(v as u32) as usize;
            out.groups[w].push(communities[c].clone());
        }
        Ok(out)
    }

    /// Every community of the cover that contains the word.
    pub fn cover(graph: &PairwiseGraph, cover: &Cover, lexicon: &Lexicon) -> Result<Self> {
        let map = to_lexicon(graph.nodes(), lexicon)?;
        let mut out = Self::empty(lexicon);
        for c in &cover.communities {
            let members: Vec<usize> = c.iter().map(|&v| map[v as usize]).collect();
            for &w in &members {
                out.groups[w].push(members.clone());
            }
        }
        Ok(out)
    }

    /// Every hyperedge of the word's star ego-network.
    pub fn hypergraph(h: &Hypergraph, lexicon: &Lexicon) -> Result<Self> {
        let map = to_lexicon(h.nodes(), lexicon)?;
        let mut out = Self::empty(lexicon);
        for (v, &w) in map.iter().enumerate() {
            for &k in h.incident(v as u32) {
                out.groups[w].push(
                    h.edge(k as usize)
                        .iter()
                        .map(|&u| map[u as usize])
                        .collect(),
                );
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn contexts_of(&self, word: usize) -> &[Vec<usize>] {
        &self.groups[word]
    }

    /// Characteristic values of all features for one word.
    pub fn characteristic_row(
        &self,
        lexicon: &Lexicon,
        word: usize,
        gap: bool,
    ) -> ([f64; crate::N_FEATURES], bool) {
        let mut acc = [0.0; crate::N_FEATURES];
        let mut used = 0usize;
        for group in &self.groups[word] {
            let mut sum = [0.0; crate::N_FEATURES];
            let mut n = 0usize;
            for &m in group.iter().filter(|&&m| !(gap && m == word)) {
                for (s, v) in sum.iter_mut().zip(lexicon.row(m)) {
                    *s += v;
                }
                n += 1;
            }
            if n == 0 {
                continue;
            }
            for (a, s) in acc.iter_mut().zip(sum) {
                *a += s / n as f64;
            }
            used += 1;
        }
        if used == 0 {
            return (*lexicon.row(word), true);
        }
        (acc.map(|a| a / used as f64), false)
    }

    pub fn characteristic(
        &self,
        lexicon: &Lexicon,
        word: usize,
        feature: FeatureName,
        gap: bool,
    ) -> Characteristic {
        let (row, fallback) = self.characteristic_row(lexicon, word, gap);
        Characteristic {
            value: row[feature.index()],
            fallback,
        }
    }
}

fn single(
    contexts: &ContextSet,
    lexicon: &Lexicon,
    word: &str,
    feature: FeatureName,
    gap: bool,
) -> Result<f64> {
    let idx = lexicon
        .index_of(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let c = contexts.characteristic(lexicon, idx, feature, gap);
    if c.fallback {
        log::warn!("`{word}` has no usable context; using its own {feature}");
    }
    Ok(c.value)
}

/// Mean over the word's ego-network (neighbours, plus the word unless `gap`).
pub fn characteristic_ego(
    graph: &PairwiseGraph,
    lexicon: &Lexicon,
    word: &str,
    feature: FeatureName,
    gap: bool,
) -> Result<f64> {
    if graph.nodes().id(word).is_none() {
        return Err(Error::UnknownWord(word.to_string()));
    }
    single(
        &ContextSet::ego(graph, lexicon)?,
        lexicon,
        word,
        feature,
        gap,
    )
}

/// Mean over the word's community.
pub fn characteristic_partition(
    graph: &PairwiseGraph,
    partition: &Partition,
    lexicon: &Lexicon,
    word: &str,
    feature: FeatureName,
    gap: bool,
) -> Result<f64> {
    single(
        &ContextSet::partition(graph, partition, lexicon)?,
        lexicon,
        word,
        feature,
        gap,
    )
}

/// Unweighted mean of per-community means over communities containing the word.
pub fn characteristic_cover(
    graph: &PairwiseGraph,
    cover: &Cover,
    lexicon: &Lexicon,
    word: &str,
    feature: FeatureName,
    gap: bool,
) -> Result<f64> {
    single(
        &ContextSet::cover(graph, cover, lexicon)?,
        lexicon,
        word,
        feature,
        gap,
    )
}

/// Unweighted mean of per-hyperedge means over the word's star ego-network.
pub fn characteristic_hypergraph(
    h: &Hypergraph,
    lexicon: &Lexicon,
    word: &str,
    feature: FeatureName,
    gap: bool,
) -> Result<f64> {
    if h.nodes().id(word).is_none() {
        return Err(Error::UnknownWord(word.to_string()));
    }
    single(
        &ContextSet::hypergraph(h, lexicon)?,
        lexicon,
        word,
        feature,
        gap,
    )
}

/// Regression dataset for one strategy: predictors are characteristic values,
/// the target column holds empirical values.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub words: Vec<String>,
    pub predictors: Vec<FeatureName>,
    pub rows: Vec<Vec<f64>>,
    pub target_values: Vec<f64>,
    pub strategy: Strategy,
    pub target: FeatureName,
    pub fallbacks: usize,
}

/// Builds one row per lexicon word. With `include_target` the aggregated
/// target joins the predictors (an ablation: it carries the word's own value).
pub fn build_feature_matrix(
    lexicon: &Lexicon,
    contexts: &ContextSet,
    strategy: Strategy,
    target: FeatureName,
    include_target: bool,
) -> Result<FeatureMatrix> {
    if contexts.len() != lexicon.len() {
        return Err(Error::InvalidInput(
            "context set does not match lexicon".into(),
        ));
    }
    let predictors: Vec<FeatureName> = if include_target {
        FeatureName::ALL.to_vec()
    } else {
        FeatureName::predictors_for(target)
    };
    let mut rows = Vec::with_capacity(lexicon.len());
    let mut fallbacks = 0;
    for w in 0..lexicon.len() {
        let (values, fallback) = if strategy.kind == StrategyKind::NonNetwork {
            (*lexicon.row(w), false)
        } else {
            contexts.characteristic_row(lexicon, w, strategy.gap)
        };
        fallbacks += usize::from(fallback);
        let row: Vec<f64> = predictors.iter().map(|f| values[f.index()]).collect();
        if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "unresolved value for `{}` / {}",
                lexicon.words()[w],
                predictors[bad]
            )));
        }
        rows.push(row);
    }
    if fallbacks > 0 {
        log::warn!("{strategy}: {fallbacks} words fell back to their own values");
    }
    Ok(FeatureMatrix {
        words: lexicon.words().to_vec(),
        predictors,
        rows,
        target_values: lexicon.column(target),
        strategy,
        target,
        fallbacks,
    })
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, feature: FeatureName) -> Option<Vec<f64>> {
        let j = self.predictors.iter().position(|&f| f == feature)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// CSV: `word`, predictors suffixed by the strategy tag, then the target.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let tag = self.strategy.tag();
        let mut header = vec!["word".to_string()];
        header.extend(self.predictors.iter().map(|f| format!("{f}_{tag}")));
        header.push(self.target.to_string());
        w.write_record(&header)?;
        for ((word, row), y) in self.words.iter().zip(&self.rows).zip(&self.target_values) {
            let mut rec = vec![word.clone()];
            rec.extend(row.iter().map(f64::to_string));
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        w.flush()
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidInput(format!("feature matrix csv: {msg}"));
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr
            .headers()
            .map_err(|e| Error::csv("<feature matrix>", e))?
            .clone();
        if header.len() < 3 || &header[0] != "word" {
            return Err(bad(
                "expected `word`, predictor columns and a target column",
            ));
        }
        let target: FeatureName = header[header.len() - 1].parse()?;
        let first = &header[1];
        let (feature, tag) = FeatureName::ALL
            .iter()
            .find_map(|f| first.strip_prefix(&format!("{f}_")).map(|t| (*f, t)))
            .ok_or_else(|| bad("unrecognized predictor column"))?;
        let strategy = Strategy::from_tag(tag)?;
        let mut predictors = vec![feature];
        for h in header.iter().skip(2).take(header.len() - 3) {
            let name = h
                .strip_suffix(&format!("_{tag}"))
                .ok_or_else(|| bad("inconsistent strategy suffix"))?;
            predictors.push(name.parse()?);
        }
        let mut m = FeatureMatrix {
            words: Vec::new(),
            predictors,
            rows: Vec::new(),
            target_values: Vec::new(),
            strategy,
            target,
            fallbacks: 0,
        };
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::csv("<feature matrix>", e))?;
            let nums: Vec<f64> = rec
                .iter()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|_| bad("non-numeric value")))
                .collect::<Result<_>>()?;
            m.words.push(rec[0].to_string());
            m.target_values.push(nums[nums.len() - 1]);
            m.rows.push(nums[..nums.len() - 1].to_vec());
        }
        Ok(m)
    }
}
