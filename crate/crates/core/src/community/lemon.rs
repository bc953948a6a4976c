//! Local spectral seed-set expansion.
//!
//! Around a seed, a small subgraph is sampled by short random walks. A few
//! random-walk vectors started at the seed set span an approximate invariant
//! subspace; a sparse non-negative vector in that span, containing the seeds,
//! is found with an l1-minimizing linear program. Nodes are ranked by that
//! vector and the best-conductance prefix becomes the community. The seed set
//! then grows by the top-ranked outsider and the loop repeats while
//! conductance improves.

use std::collections::HashMap;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::Cover;
use crate::error::{Error, Result};
use crate::network::PairwiseGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemonParams {
    pub max_size: usize,
    pub min_size: usize,
    /// Subspace iterations applied to the initial random-walk block.
    pub walk_steps: usize,
    pub subspace_dim: usize,
    /// Upper bound on the sampled local subgraph.
    pub sample_size: usize,
    pub max_expansions: usize,
}

impl Default for LemonParams {
    fn default() -> Self {
        LemonParams {
            max_size: 4,
            min_size: 3,
            walk_steps: 3,
            subspace_dim: 3,
            sample_size: 200,
            max_expansions: 4,
        }
    }
}

impl LemonParams {
    fn validate(&self) -> Result<()> {
        if self.max_size == 0 || self.min_size == 0 || self.min_size > self.max_size {
            return Err(Error::InvalidInput(format!(
                "lemon sizes must satisfy 1 <= min_size <= max_size, got {}..{}",
                self.min_size, self.max_size
            )));
        }
        if self.subspace_dim == 0 || self.sample_size < self.max_size {
            return Err(Error::InvalidInput(
                "lemon subspace/sample sizes too small".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn conductance(graph: &PairwiseGraph, set: &[u32], total_volume: f64) -> f64 {
    let mut vol = 0.0;
    let mut internal = 0.0;
    for &v in set {
        vol += graph.degree(v) as f64;
        internal += graph
            .neighbors(v)
            .iter()
            .filter(|u| set.contains(u))
            .count() as f64;
    }
    let cut = vol - internal;
    let denom = vol.min(total_volume - vol);
    if denom <= 0.0 {
        return if cut > 0.0 { 1.0 } else { 0.0 };
    }
    cut / denom
}

/// Nodes reachable from the seeds in two steps, keeping the `cap` with the
/// largest two-step walk probability (seeds always kept).
fn sample_subgraph(graph: &PairwiseGraph, seeds: &[u32], cap: usize) -> Vec<u32> {
    let mut p: HashMap<u32, f64> = seeds
        .iter()
        .map(|&s| (s, 1.0 / seeds.len() as f64))
        .collect();
    for _ in 0..2 {
        let mut next: HashMap<u32, f64> = HashMap::with_capacity(p.len() * 4);
        for (&v, &pv) in &p {
            // lazy walk
            *next.entry(v).or_default() += 0.5 * pv;
            let d = graph.degree(v);
            if d == 0 {
                *next.entry(v).or_default() += 0.5 * pv;
                continue;
            }
            let share = 0.5 * pv / d as f64;
            for &u in graph.neighbors(v) {
                *next.entry(u).or_default() += share;
            }
        }
        p = next;
    }
    let mut nodes: Vec<(u32, f64)> = p.into_iter().filter(|(v, _)| !seeds.contains(v)).collect();
    nodes.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut out: Vec<u32> = seeds.to_vec();
    out.extend(
        nodes
            .into_iter()
            .take(cap.saturating_sub(seeds.len()))
            .map(|(v, _)| v),
    );
    out.sort_unstable();
    out
}

struct LocalGraph {
    adjacency: Vec<Vec<usize>>,
    inv_sqrt_degree: Vec<f64>,
}

impl LocalGraph {
    fn new(graph: &PairwiseGraph, nodes: &[u32]) -> Self {
        let pos: HashMap<u32, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let adjacency: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&v| {
                graph
                    .neighbors(v)
                    .iter()
                    .filter_map(|u| pos.get(u).copied())
                    .collect()
            })
            .collect();
        // self-loop added to every node
        let inv_sqrt_degree = adjacency
            .iter()
            .map(|a| 1.0 / ((a.len() + 1) as f64).sqrt())
            .collect();
        LocalGraph {
            adjacency,
            inv_sqrt_degree,
        }
    }

    /// `D^{-1/2} (A + I) D^{-1/2} x`
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let s = &self.inv_sqrt_degree;
        (0..x.len())
            .map(|i| {
                let acc: f64 =
                    x[i] * s[i] + self.adjacency[i].iter().map(|&j| x[j] * s[j]).sum::<f64>();
                acc * s[i]
            })
            .collect()
    }
}

fn orthonormalize(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= d * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

/// Sparse non-negative vector in span(basis) with `y[s] >= 1` on seeds.
fn sparse_indicator(basis: &[Vec<f64>], seed_pos: &[usize]) -> Option<Vec<f64>> {
    let n = basis[0].len();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = basis
        .iter()
        .map(|b| lp.add_var(b.iter().sum(), (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for i in 0..n {
        let row: Vec<_> = vars.iter().zip(basis).map(|(&x, b)| (x, b[i])).collect();
        let rhs = if seed_pos.contains(&i) { 1.0 } else { 0.0 };
        lp.add_constraint(&row, ComparisonOp::Ge, rhs);
    }
    let sol = lp.solve().ok()?;
    Some(
        (0..n)
            .map(|i| vars.iter().zip(basis).map(|(&x, b)| sol[x] * b[i]).sum())
            .collect(),
    )
}

/// Ranks local nodes by the spectral indicator of the current seed set.
fn rank(graph: &PairwiseGraph, seeds: &[u32], params: &LemonParams) -> Vec<u32> {
    let nodes = sample_subgraph(graph, seeds, params.sample_size);
    let local = LocalGraph::new(graph, &nodes);
    let seed_pos: Vec<usize> = seeds
        .iter()
        .map(|s| nodes.binary_search(s).expect("seed in sample"))
        .collect();
    let mut p0 = vec![0.0; nodes.len()];
    for &i in &seed_pos {
        p0[i] = 1.0 / seed_pos.len() as f64;
    }
    let mut block = Vec::with_capacity(params.subspace_dim);
    block.push(p0.clone());
    for k in 1..params.subspace_dim {
        let next = local.apply(&block[k - 1]);
        block.push(next);
    }
    let mut basis = orthonormalize(block);
    for _ in 0..params.walk_steps {
        let next = orthonormalize(basis.iter().map(|b| local.apply(b)).collect());
        if next.is_empty() {
            break;
        }
        basis = next;
    }
    let score = sparse_indicator(&basis, &seed_pos).unwrap_or_else(|| {
        log::debug!("lemon LP failed; ranking by walk probability");
        let mut v = p0;
        for _ in 0..params.walk_steps.max(1) {
            v = local.apply(&v);
        }
        v
    });
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    order.into_iter().map(|i| nodes[i]).collect()
}

/// Grows a local community around `seed`; the result always contains the
/// seed and never exceeds `params.max_size` nodes.
pub fn lemon(graph: &PairwiseGraph, seed: u32, params: &LemonParams) -> Result<Vec<u32>> {
    params.validate()?;
    if seed as usize >= graph.node_count() {
        return Err(Error::UnknownWord(format!("node #{seed}")));
    }
    if graph.degree(seed) == 0 {
        log::warn!("lemon seed `{}` is isolated", graph.nodes().word(seed));
        return Ok(vec![seed]);
    }
    let total_volume = 2.0 * graph.edge_count() as f64;
    let mut seeds = vec![seed];
    let mut best: Option<(f64, Vec<u32>)> = None;
    for _ in 0..=params.max_expansions {
        let ranking = rank(graph, &seeds, params);
        let outsiders: Vec<u32> = ranking.into_iter().filter(|v| !seeds.contains(v)).collect();
        let lo = params.min_size.max(seeds.len());
        let hi = params.max_size.min(seeds.len() + outsiders.len());
        let mut round: Option<(f64, Vec<u32>)> = None;
        for size in lo.min(hi)..=hi {
            let mut set: Vec<u32> = seeds.clone();
            set.extend(&outsiders[..size - seeds.len()]);
            set.sort_unstable();
            let phi = conductance(graph, &set, total_volume);
            if round.as_ref().is_none_or(|(b, _)| phi < *b) {
                round = Some((phi, set));
            }
        }
        let Some((phi, set)) = round else { break };
        let improved = best.as_ref().is_none_or(|(b, _)| phi < *b);
        if !improved {
            break;
        }
        best = Some((phi, set));
        if seeds.len() + 1 >= params.max_size || outsiders.is_empty() {
            break;
        }
        seeds.push(outsiders[0]);
    }
    let (_, mut set) = best.expect("at least one candidate set");
    set.sort_unstable();
    Ok(set)
}

/// One Lemon run per node, each node used as seed once.
pub fn lemon_cover(graph: &PairwiseGraph, params: &LemonParams) -> Result<Cover> {
    if graph.node_count() == 0 {
        return Err(Error::Empty("graph"));
    }
    let mut cover = Cover::default();
    for v in 0..graph.node_count() as u32 {
        cover.communities.push(lemon(graph, v, params)?);
        cover.seeds.push(v);
    }
    Ok(cover)
}

/// Minimum-conductance set of size <= `max_size` containing `seed`, by
/// exhaustive search over connected and disconnected subsets alike.
#[cfg(test)]
fn brute_force_best(
    graph: &PairwiseGraph,
    seed: u32,
    max_size: usize,
    min_size: usize,
) -> (f64, Vec<u32>) {
    let n = graph.node_count() as u32;
    let total = 2.0 * graph.edge_count() as f64;
    let others: Vec<u32> = (0..n).filter(|&v| v != seed).collect();
    let mut best = (f64::INFINITY, vec![]);
    let mut stack: Vec<(usize, Vec<u32>)> = vec![(0, vec![seed])];
    while let Some((start, set)) = stack.pop() {
        if set.len() >= min_size {
            let mut s = set.clone();
            s.sort_unstable();
            let phi = conductance(graph, &s, total);
            if phi < best.0 - 1e-15 || (phi - best.0).abs() <= 1e-15 && s < best.1 {
                best = (phi, s);
            }
        }
        if set.len() == max_size {
            continue;
        }
        for (k, &o) in others.iter().enumerate().skip(start) {
            let mut next = set.clone();
            next.push(o);
            stack.push((k + 1, next));
        }
    }
    best
}
