//! Crisp (Louvain, EVA) and overlapping local (Lemon) communities on
//! pairwise graphs.

mod lemon;
mod louvain;

use std::collections::HashMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::FeatureName;
use crate::lexicon::Lexicon;
use crate::network::PairwiseGraph;

pub use lemon::{lemon, lemon_cover, LemonParams};
pub use louvain::{eva, louvain, LouvainRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMethod {
    Louvain,
    Eva,
}

/// Node id (graph order) to community id; ids are contiguous from 0 in order
/// of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    assignment: Vec<u32>,
    n_communities: usize,
    pub method: PartitionMethod,
    pub gamma: f64,
    pub alpha: Option<f64>,
}

impl Partition {
    pub fn new(raw: &[u32], method: PartitionMethod, gamma: f64, alpha: Option<f64>) -> Self {
        let mut remap = HashMap::new();
        let assignment: Vec<u32> = raw
            .iter()
            .map(|c| {
                let next = remap.len() as u32;
                *remap.entry(*c).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            n_communities: remap.len(),
            method,
            gamma,
            alpha,
        }
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    pub fn community_of(&self, node: u32) -> u32 {
        self.assignment[node as usize]
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    /// Members of every community, indexed by community id.
    pub fn communities(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c as usize].push(v as u32);
        }
        out
    }

    /// CSV `word,community_id`.
    pub fn write_csv<W: Write>(&self, graph: &PairwiseGraph, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "community_id"])?;
        for (v, c) in self.assignment.iter().enumerate() {
            w.write_record([graph.nodes().word(v as u32), &c.to_string()])?;
        }
        w.flush()
    }
}

/// Overlapping communities, each tagged with the seed it grew from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cover {
    pub communities: Vec<Vec<u32>>,
    pub seeds: Vec<u32>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    /// For each node, the indices of communities containing it.
    pub fn memberships(&self, n_nodes: usize) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); n_nodes];
        for (k, c) in self.communities.iter().enumerate() {
            for &v in c {
                out[v as usize].push(k as u32);
            }
        }
        out
    }

    /// One line per community: seed followed by tab-joined members.
    pub fn write_lines<W: Write>(&self, graph: &PairwiseGraph, mut out: W) -> io::Result<()> {
        for (seed, members) in self.seeds.iter().zip(&self.communities) {
            let words: Vec<&str> = members.iter().map(|&v| graph.nodes().word(v)).collect();
            writeln!(out, "{}\t{}", graph.nodes().word(*seed), words.join("\t"))?;
        }
        Ok(())
    }
}

/// `Q = (1/2m) Σ_ij [A_ij − γ k_i k_j / 2m] δ(c_i, c_j)`.
pub fn modularity(graph: &PairwiseGraph, assignment: &[u32], gamma: f64) -> Result<f64> {
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if assignment.len() != graph.node_count() {
        return Err(Error::InvalidInput("partition does not cover graph".into()));
    }
    let m = graph.edge_count() as f64;
    let mut internal: HashMap<u32, f64> = HashMap::new();
    let mut degree: HashMap<u32, f64> = HashMap::new();
    for v in 0..graph.node_count() as u32 {
        *degree.entry(assignment[v as usize]).or_default() += graph.degree(v) as f64;
    }
    for (u, v) in graph.edges() {
        let cu = assignment[u as usize];
        if cu == assignment[v as usize] {
            *internal.entry(cu).or_default() += 1.0;
        }
    }
    let mut keys: Vec<u32> = degree.keys().copied().collect();
    keys.sort_unstable();
    Ok(keys
        .iter()
        .map(|c| {
            let l = internal.get(c).copied().unwrap_or(0.0);
            let d = degree[c];
            l / m - gamma * (d / (2.0 * m)).powi(2)
        })
        .sum())
}

/// Quantile-binned categorical labels per word, used by the EVA purity term.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedAttributes {
    pub features: Vec<FeatureName>,
    pub n_bins: usize,
    labels: HashMap<String, Vec<u8>>,
}

impl BinnedAttributes {
    /// Bins each feature at its `k / n_bins` quantiles over the lexicon.
    pub fn quantile(lexicon: &Lexicon, features: &[FeatureName], n_bins: usize) -> Result<Self> {
        if n_bins < 2 || n_bins > u8::MAX as usize {
            return Err(Error::InvalidInput(format!(
                "bin count {n_bins} out of range"
            )));
        }
        if lexicon.is_empty() {
            return Err(Error::Empty("lexicon"));
        }
        let cuts: Vec<Vec<f64>> = features
            .iter()
            .map(|&f| {
                let mut col = lexicon.column(f);
                col.sort_by(f64::total_cmp);
                (1..n_bins)
                    .map(|k| crate::stats::quantile_sorted(&col, k as f64 / n_bins as f64))
                    .collect()
            })
            .collect();
        let labels = lexicon
            .words()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let row = features
                    .iter()
                    .zip(&cuts)
                    .map(|(&f, cut)| {
                        let v = lexicon.value(i, f);
                        cut.iter().filter(|&&c| v > c).count() as u8
                    })
                    .collect();
                (w.clone(), row)
            })
            .collect();
        Ok(BinnedAttributes {
            features: features.to_vec(),
            n_bins,
            labels,
        })
    }

    pub fn from_labels(
        features: Vec<FeatureName>,
        n_bins: usize,
        labels: HashMap<String, Vec<u8>>,
    ) -> Self {
        BinnedAttributes {
            features,
            n_bins,
            labels,
        }
    }

    pub fn labels(&self, word: &str) -> Option<&[u8]> {
        self.labels.get(word).map(Vec::as_slice)
    }
}

/// Product over features of the modal label frequency within `members`.
pub fn purity(attrs: &BinnedAttributes, words: &[&str]) -> Result<f64> {
    if words.is_empty() {
        return Err(Error::Empty("community"));
    }
    let mut counts = vec![0u32; attrs.features.len() * attrs.n_bins];
    for w in words {
        let l = attrs
            .labels(w)
            .ok_or_else(|| Error::MissingAttribute(w.to_string()))?;
        for (f, &b) in l.iter().enumerate() {
            counts[f * attrs.n_bins + b as usize] += 1;
        }
    }
    Ok(louvain::purity_of_counts(
        &counts,
        attrs.n_bins,
        words.len() as f64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_triangles() -> PairwiseGraph {
        PairwiseGraph::from_edges([
            ("a", "b"),
            ("b", "c"),
            ("a", "c"),
            ("d", "e"),
            ("e", "f"),
            ("d", "f"),
            ("c", "d"),
        ])
    }

    /// Direct double sum over node pairs.
    fn modularity_oracle(g: &PairwiseGraph, part: &[u32], gamma: f64) -> f64 {
        let n = g.node_count() as u32;
        let m = g.edge_count() as f64;
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if part[i as usize] != part[j as usize] {
                    continue;
                }
                let a = if g.neighbors(i).contains(&j) {
                    1.0
                } else {
                    0.0
                };
                let ki = g.degree(i) as f64;
                let kj = g.degree(j) as f64;
                q += a - gamma * ki * kj / (2.0 * m);
            }
        }
        q / (2.0 * m)
    }

    #[test]
    fn single_community_has_zero_modularity() {
        let g = two_triangles();
        let q = modularity(&g, &[0; 6], 1.0).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn singleton_partition_closed_form() {
        let g = two_triangles();
        let part: Vec<u32> = (0..6).collect();
        let m2 = 2.0 * g.edge_count() as f64;
        let expected: f64 = -(0..6u32)
            .map(|v| (g.degree(v) as f64 / m2).powi(2))
            .sum::<f64>();
        assert!((modularity(&g, &part, 1.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn two_triangles_matches_double_sum() {
        let g = two_triangles();
        let part = [0, 0, 0, 1, 1, 1];
        for gamma in [0.5, 1.0, 2.0] {
            let q = modularity(&g, &part, gamma).unwrap();
            assert!((q - modularity_oracle(&g, &part, gamma)).abs() < 1e-14);
        }
        // 5/14 hand value at gamma=1
        assert!((modularity(&g, &part, 1.0).unwrap() - 5.0 / 14.0).abs() < 1e-14);
    }

    #[test]
    fn edgeless_graph_is_an_error() {
        let g = PairwiseGraph::from_edges(std::iter::empty::<(&str, &str)>());
        assert!(matches!(modularity(&g, &[], 1.0), Err(Error::NoEdges)));
    }

    #[test]
    fn partition_ids_are_contiguous() {
        let p = Partition::new(&[7, 7, 3, 9, 3], PartitionMethod::Louvain, 1.0, None);
        assert_eq!(p.assignment(), [0, 0, 1, 2, 1]);
        assert_eq!(p.n_communities(), 3);
    }

    #[test]
    fn purity_is_one_for_uniform_labels() {
        let labels = HashMap::from([
            ("a".to_string(), vec![1, 2]),
            ("b".to_string(), vec![1, 2]),
            ("c".to_string(), vec![0, 2]),
        ]);
        let attrs =
            BinnedAttributes::from_labels(vec![FeatureName::Valence, FeatureName::Aoa], 4, labels);
        assert_eq!(purity(&attrs, &["a", "b"]).unwrap(), 1.0);
        assert!((purity(&attrs, &["a", "b", "c"]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            purity(&attrs, &["zz"]),
            Err(Error::MissingAttribute(_))
        ));
    }
}
