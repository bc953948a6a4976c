//! Multi-level greedy optimization of `α·P + (1−α)·Q`.
//!
//! With `α = 0` this is plain Louvain. Purity `P` is the average over
//! non-empty communities of the product, over attributes, of the modal label
//! frequency. Label counts are carried through coarsening so that the
//! objective evaluated at any level equals the objective on the input graph.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BinnedAttributes, Partition, PartitionMethod};
use crate::error::{Error, Result};
use crate::network::PairwiseGraph;

const MIN_GAIN: f64 = 1e-12;

/// Result of a Louvain/EVA run. `trace` holds the exact objective after every
/// local-moving pass, in order.
#[derive(Debug, Clone)]
pub struct LouvainRun {
    pub partition: Partition,
    pub objective: f64,
    pub trace: Vec<f64>,
}

pub(crate) fn purity_of_counts(counts: &[u32], n_bins: usize, size: f64) -> f64 {
    counts
        .chunks(n_bins)
        .map(|c| *c.iter().max().unwrap() as f64 / size)
        .product()
}

struct Attributes {
    n_bins: usize,
    width: usize,
}

struct Level {
    adjacency: Vec<Vec<(u32, f64)>>,
    self_weight: Vec<f64>,
    degree: Vec<f64>,
    size: Vec<f64>,
    counts: Vec<u32>,
}

impl Level {
    fn n(&self) -> usize {
        self.adjacency.len()
    }
}

struct State<'a> {
    level: &'a Level,
    attrs: Option<&'a Attributes>,
    m: f64,
    gamma: f64,
    alpha: f64,
    community: Vec<u32>,
    comm_degree: Vec<f64>,
    comm_internal: Vec<f64>,
    comm_size: Vec<f64>,
    comm_counts: Vec<u32>,
    comm_purity: Vec<f64>,
    purity_sum: f64,
    n_nonempty: usize,
}

impl<'a> State<'a> {
    fn singletons(
        level: &'a Level,
        attrs: Option<&'a Attributes>,
        m: f64,
        gamma: f64,
        alpha: f64,
    ) -> Self {
        let n = level.n();
        let comm_purity: Vec<f64> = match attrs {
            Some(a) => (0..n)
                .map(|v| {
                    purity_of_counts(
                        &level.counts[v * a.width..(v + 1) * a.width],
                        a.n_bins,
                        level.size[v],
                    )
                })
                .collect(),
            None => vec![1.0; n],
        };
        State {
            level,
            attrs,
            m,
            gamma,
            alpha,
            community: (0..n as u32).collect(),
            comm_degree: level.degree.clone(),
            comm_internal: level.self_weight.clone(),
            comm_size: level.size.clone(),
            comm_counts: level.counts.clone(),
            purity_sum: comm_purity.iter().sum(),
            comm_purity,
            n_nonempty: n,
        }
    }

    fn counts(&self, c: usize) -> &[u32] {
        let w = self.attrs.map_or(0, |a| a.width);
        &self.comm_counts[c * w..(c + 1) * w]
    }

    fn counts_mut(&mut self, c: usize) -> &mut [u32] {
        let w = self.attrs.map_or(0, |a| a.width);
        &mut self.comm_counts[c * w..(c + 1) * w]
    }

    fn recompute_purity(&mut self, c: usize) {
        let Some(a) = self.attrs else { return };
        let p = if self.comm_size[c] > 0.0 {
            purity_of_counts(self.counts(c), a.n_bins, self.comm_size[c])
        } else {
            0.0
        };
        self.purity_sum += p - self.comm_purity[c];
        self.comm_purity[c] = p;
    }

    fn modularity(&self) -> f64 {
        (0..self.level.n())
            .filter(|&c| self.comm_size[c] > 0.0)
            .map(|c| {
                self.comm_internal[c] / self.m
                    - self.gamma * (self.comm_degree[c] / (2.0 * self.m)).powi(2)
            })
            .sum()
    }

    fn purity(&self) -> f64 {
        if self.attrs.is_none() {
            return 0.0;
        }
        self.purity_sum / self.n_nonempty as f64
    }

    fn objective(&self) -> f64 {
        if self.attrs.is_none() {
            return self.modularity();
        }
        self.alpha * self.purity() + (1.0 - self.alpha) * self.modularity()
    }

    fn remove(&mut self, v: usize, links_to_own: f64) {
        let c = self.community[v] as usize;
        let l = self.level;
        self.comm_degree[c] -= l.degree[v];
        self.comm_internal[c] -= links_to_own + l.self_weight[v];
        self.comm_size[c] -= l.size[v];
        if let Some(a) = self.attrs {
            let node = &l.counts[v * a.width..(v + 1) * a.width];
            for (dst, src) in self.counts_mut(c).iter_mut().zip(node) {
                *dst -= src;
            }
            self.recompute_purity(c);
        }
        if self.comm_size[c] == 0.0 {
            self.n_nonempty -= 1;
        }
    }

    fn insert(&mut self, v: usize, c: usize, links_to_target: f64) {
        let l = self.level;
        if self.comm_size[c] == 0.0 {
            self.n_nonempty += 1;
        }
        self.community[v] = c as u32;
        self.comm_degree[c] += l.degree[v];
        self.comm_internal[c] += links_to_target + l.self_weight[v];
        self.comm_size[c] += l.size[v];
        if let Some(a) = self.attrs {
            let node = &l.counts[v * a.width..(v + 1) * a.width];
            for (dst, src) in self.counts_mut(c).iter_mut().zip(node) {
                *dst += src;
            }
            self.recompute_purity(c);
        }
    }

    /// Objective change from "v alone" to "v inside c" (v already removed).
    fn gain(&self, v: usize, c: usize, links: f64, node_purity: f64) -> f64 {
        let l = self.level;
        let dq = links / self.m
            - self.gamma * l.degree[v] * self.comm_degree[c] / (2.0 * self.m * self.m);
        let Some(a) = self.attrs else { return dq };
        let node = &l.counts[v * a.width..(v + 1) * a.width];
        let (sum_alone, k_alone, sum_in, k_in) = if self.comm_size[c] == 0.0 {
            // joining an empty community is the same as staying alone
            return 0.0;
        } else {
            let merged: Vec<u32> = self
                .counts(c)
                .iter()
                .zip(node)
                .map(|(x, y)| x + y)
                .collect();
            let p_merged = purity_of_counts(&merged, a.n_bins, self.comm_size[c] + l.size[v]);
            (
                self.purity_sum + node_purity,
                self.n_nonempty + 1,
                self.purity_sum - self.comm_purity[c] + p_merged,
                self.n_nonempty,
            )
        };
        let dp = sum_in / k_in as f64 - sum_alone / k_alone as f64;
        self.alpha * dp + (1.0 - self.alpha) * dq
    }

    fn node_purity(&self, v: usize) -> f64 {
        match self.attrs {
            Some(a) => purity_of_counts(
                &self.level.counts[v * a.width..(v + 1) * a.width],
                a.n_bins,
                self.level.size[v],
            ),
            None => 1.0,
        }
    }

    /// One sweep over nodes in `order`; returns whether any node moved.
    fn sweep(&mut self, order: &[u32]) -> bool {
        let mut moved = false;
        let mut links: BTreeMap<u32, f64> = BTreeMap::new();
        for &v in order {
            let v = v as usize;
            links.clear();
            for &(u, w) in &self.level.adjacency[v] {
                *links.entry(self.community[u as usize]).or_default() += w;
            }
            let own = self.community[v];
            let own_links = links.get(&own).copied().unwrap_or(0.0);
            self.remove(v, own_links);
            let np = self.node_purity(v);

            let mut best = own;
            let mut best_gain = self.gain(v, own as usize, own_links, np);
            // BTreeMap iteration gives lowest-id-first tie-breaking
            for (&c, &w) in &links {
                if c == own {
                    continue;
                }
                let g = self.gain(v, c as usize, w, np);
                if g > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = g;
                }
            }
            let w = links.get(&best).copied().unwrap_or(0.0);
            self.insert(v, best as usize, w);
            moved |= best != own;
        }
        moved
    }

    fn aggregate(&self) -> (Level, Vec<u32>) {
        let l = self.level;
        let mut relabel = vec![u32::MAX; l.n()];
        let mut next = 0u32;
        for &c in &self.community {
            if relabel[c as usize] == u32::MAX {
                relabel[c as usize] = next;
                next += 1;
            }
        }
        let k = next as usize;
        let map: Vec<u32> = self
            .community
            .iter()
            .map(|&c| relabel[c as usize])
            .collect();
        let width = self.attrs.map_or(0, |a| a.width);
        let mut adj: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); k];
        let mut self_weight = vec![0.0; k];
        let mut degree = vec![0.0; k];
        let mut size = vec![0.0; k];
        let mut counts = vec![0u32; k * width];
        for v in 0..l.n() {
            let cv = map[v] as usize;
            degree[cv] += l.degree[v];
            size[cv] += l.size[v];
            self_weight[cv] += l.self_weight[v];
            for (dst, src) in counts[cv * width..(cv + 1) * width]
                .iter_mut()
                .zip(&l.counts[v * width..(v + 1) * width])
            {
                *dst += src;
            }
            for &(u, w) in &l.adjacency[v] {
                let cu = map[u as usize];
                if cu as usize == cv {
                    // each internal edge is seen from both ends
                    self_weight[cv] += w / 2.0;
                } else {
                    *adj[cv].entry(cu).or_default() += w;
                }
            }
        }
        let level = Level {
            adjacency: adj.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_weight,
            degree,
            size,
            counts,
        };
        (level, map)
    }
}

fn optimize(
    graph: &PairwiseGraph,
    attrs: Option<(Attributes, Vec<u32>)>,
    alpha: f64,
    gamma: f64,
    seed: u64,
    method: PartitionMethod,
) -> Result<LouvainRun> {
    if graph.node_count() == 0 {
        return Err(Error::Empty("graph"));
    }
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let n = graph.node_count();
    let (attrs, counts) = match attrs {
        Some((a, c)) => (Some(a), c),
        None => (None, Vec::new()),
    };
    let mut level = Level {
        adjacency: (0..n as u32)
            .map(|v| graph.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
            .collect(),
        self_weight: vec![0.0; n],
        degree: (0..n as u32).map(|v| graph.degree(v) as f64).collect(),
        size: vec![1.0; n],
        counts,
    };
    let m = graph.edge_count() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<u32> = (0..n as u32).collect();
    let mut trace = Vec::new();
    let mut objective;
    loop {
        let mut state = State::singletons(&level, attrs.as_ref(), m, gamma, alpha);
        objective = state.objective();
        if trace.is_empty() {
            trace.push(objective);
        }
        let mut order: Vec<u32> = (0..level.n() as u32).collect();
        order.shuffle(&mut rng);
        let mut any_move = false;
        while state.sweep(&order) {
            any_move = true;
            objective = state.objective();
            trace.push(objective);
        }
        if !any_move {
            break;
        }
        let (next, map) = state.aggregate();
        for c in &mut membership {
            *c = map[*c as usize];
        }
        let shrunk = next.n() < level.n();
        level = next;
        if !shrunk {
            break;
        }
    }
    Ok(LouvainRun {
        partition: Partition::new(
            &membership,
            method,
            gamma,
            (method == PartitionMethod::Eva).then_some(alpha),
        ),
        objective,
        trace,
    })
}

/// Greedy modularity optimization (local moves + coarsening).
pub fn louvain(graph: &PairwiseGraph, gamma: f64, seed: u64) -> Result<LouvainRun> {
    optimize(graph, None, 0.0, gamma, seed, PartitionMethod::Louvain)
}

/// Louvain extended with a purity term over binned node attributes.
pub fn eva(
    graph: &PairwiseGraph,
    attrs: &BinnedAttributes,
    alpha: f64,
    gamma: f64,
    seed: u64,
) -> Result<LouvainRun> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let width = attrs.features.len() * attrs.n_bins;
    let mut counts = vec![0u32; graph.node_count() * width];
    for (v, word) in graph.nodes().words().iter().enumerate() {
        let labels = attrs
            .labels(word)
            .ok_or_else(|| Error::MissingAttribute(word.clone()))?;
        for (f, &b) in labels.iter().enumerate() {
            counts[v * width + f * attrs.n_bins + b as usize] = 1;
        }
    }
    let a = Attributes {
        n_bins: attrs.n_bins,
        width,
    };
    optimize(
        graph,
        Some((a, counts)),
        alpha,
        gamma,
        seed,
        PartitionMethod::Eva,
    )
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::community::{modularity, purity};
    use crate::feature::FeatureName;

    fn two_triangles() -> PairwiseGraph {
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

    /// Every set partition of `n` items as restricted growth strings.
    fn all_partitions(n: usize) -> Vec<Vec<u32>> {
        fn rec(prefix: &mut Vec<u32>, max: u32, n: usize, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            for c in 0..=max + 1 {
                prefix.push(c);
                rec(prefix, max.max(c), n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(&mut vec![0], 0, n, &mut out);
        out
    }

    fn same_partition(a: &[u32], b: &[u32]) -> bool {
        Partition::new(a, PartitionMethod::Louvain, 1.0, None).assignment()
            == Partition::new(b, PartitionMethod::Louvain, 1.0, None).assignment()
    }

    #[test]
    fn two_triangles_reach_exhaustive_optimum() {
        let g = two_triangles();
        let parts = all_partitions(6);
        assert_eq!(parts.len(), 203);
        let best = parts
            .iter()
            .max_by(|a, b| {
                modularity(&g, a, 1.0)
                    .unwrap()
                    .total_cmp(&modularity(&g, b, 1.0).unwrap())
            })
            .unwrap();
        for seed in 0..5 {
            let run = louvain(&g, 1.0, seed).unwrap();
            assert!(same_partition(run.partition.assignment(), best));
            let q = modularity(&g, run.partition.assignment(), 1.0).unwrap();
            assert!((q - run.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_single_community() {
        let words = ["a", "b", "c", "d", "e"];
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((words[i], words[j]));
            }
        }
        let g = PairwiseGraph::from_edges(edges.iter().copied());
        let run = louvain(&g, 1.0, 3).unwrap();
        assert_eq!(run.partition.n_communities(), 1);
    }

    #[test]
    fn trace_is_non_decreasing() {
        let g = two_triangles();
        for seed in 0..5 {
            let run = louvain(&g, 1.0, seed).unwrap();
            assert!(run.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }

    fn aligned_attrs(g: &PairwiseGraph) -> BinnedAttributes {
        let labels = g
            .nodes()
            .words()
            .iter()
            .map(|w| (w.clone(), vec![u8::from(w.as_str() > "c")]))
            .collect::<HashMap<_, _>>();
        BinnedAttributes::from_labels(vec![FeatureName::Concreteness], 2, labels)
    }

    #[test]
    fn eva_alpha_zero_matches_louvain() {
        let g = two_triangles();
        let attrs = aligned_attrs(&g);
        for seed in 0..5 {
            let l = louvain(&g, 1.0, seed).unwrap();
            let e = eva(&g, &attrs, 0.0, 1.0, seed).unwrap();
            assert_eq!(l.trace, e.trace);
            assert_eq!(l.partition.assignment(), e.partition.assignment());
        }
    }

    fn eva_objective(g: &PairwiseGraph, attrs: &BinnedAttributes, part: &[u32], alpha: f64) -> f64 {
        let p = Partition::new(part, PartitionMethod::Eva, 1.0, Some(alpha));
        let comms = p.communities();
        let mean_purity = comms
            .iter()
            .map(|c| {
                let words: Vec<&str> = c.iter().map(|&v| g.nodes().word(v)).collect();
                purity(attrs, &words).unwrap()
            })
            .sum::<f64>()
            / comms.len() as f64;
        alpha * mean_purity + (1.0 - alpha) * modularity(g, part, 1.0).unwrap()
    }

    #[test]
    fn eva_alpha_one_with_aligned_attribute() {
        let g = two_triangles();
        let attrs = aligned_attrs(&g);
        let run = eva(&g, &attrs, 1.0, 1.0, 0).unwrap();
        // purity is 1 for each triangle; the objective value agrees with the oracle
        let expected = eva_objective(&g, &attrs, run.partition.assignment(), 1.0);
        assert!((run.objective - expected).abs() < 1e-12);
        assert_eq!(run.objective, 1.0);
        for c in run.partition.communities() {
            let words: Vec<&str> = c.iter().map(|&v| g.nodes().word(v)).collect();
            assert_eq!(purity(&attrs, &words).unwrap(), 1.0);
        }
    }

    #[test]
    fn eva_mixed_objective_reaches_triangles() {
        let g = two_triangles();
        let attrs = aligned_attrs(&g);
        let parts = all_partitions(6);
        let best = parts
            .iter()
            .max_by(|a, b| {
                eva_objective(&g, &attrs, a, 0.8).total_cmp(&eva_objective(&g, &attrs, b, 0.8))
            })
            .unwrap();
        let run = eva(&g, &attrs, 0.8, 1.0, 1).unwrap();
        assert!(same_partition(run.partition.assignment(), best));
        assert!((run.objective - eva_objective(&g, &attrs, best, 0.8)).abs() < 1e-12);
        assert!(run.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn eva_rejects_missing_attribute_and_bad_alpha() {
        let g = two_triangles();
        let attrs = BinnedAttributes::from_labels(vec![FeatureName::Valence], 2, HashMap::new());
        assert!(matches!(
            eva(&g, &attrs, 0.5, 1.0, 0),
            Err(Error::MissingAttribute(_))
        ));
        assert!(eva(&g, &aligned_attrs(&g), 1.5, 1.0, 0).is_err());
    }
}
