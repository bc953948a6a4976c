//! Pairwise graphs and hypergraphs built from association rows.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::ResponseTable;

/// Rule that turns one association row into pairwise edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construction {
    /// cue - first response only
    R1,
    /// cue - every response
    R123,
    /// cue - R1 - R2 - R3 along present responses
    Chain,
    /// every pair among cue and responses
    Clique,
}

impl Construction {
    pub const ALL: [Construction; 4] = [
        Construction::R1,
        Construction::R123,
        Construction::Chain,
        Construction::Clique,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Construction::R1 => "r1",
            Construction::R123 => "r123",
            Construction::Chain => "chain",
            Construction::Clique => "clique",
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "r1" => Ok(Construction::R1),
            "r123" => Ok(Construction::R123),
            "chain" => Ok(Construction::Chain),
            "clique" => Ok(Construction::Clique),
            _ => Err(Error::UnknownVariant {
                kind: "construction",
                value: s.to_string(),
            }),
        }
    }
}

/// Sorted word list with a reverse index. Ids follow lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeIndex {
    words: Vec<String>,
    ids: HashMap<String, u32>,
}

impl NodeIndex {
    fn from_words<'a>(words: impl IntoIterator<Item = &'a str>) -> Self {
        let set: BTreeSet<&str> = words.into_iter().collect();
        let words: Vec<String> = set.into_iter().map(str::to_string).collect();
        let ids = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        NodeIndex { words, ids }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.ids.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Simple undirected unweighted graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseGraph {
    nodes: NodeIndex,
    adjacency: Vec<Vec<u32>>,
    n_edges: usize,
    construction: Option<Construction>,
}

impl PairwiseGraph {
    /// Builds a simple graph from word pairs; self-loops and repeats collapse.
    pub fn from_edges<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)> + Clone) -> Self {
        let nodes = NodeIndex::from_words(
            pairs
                .clone()
                .into_iter()
                .filter(|(a, b)| a != b)
                .flat_map(|(a, b)| [a, b]),
        );
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            let (i, j) = (nodes.id(a).unwrap(), nodes.id(b).unwrap());
            adjacency[i as usize].push(j);
            adjacency[j as usize].push(i);
        }
        let mut n_edges = 0;
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
            n_edges += nbrs.len();
        }
        PairwiseGraph {
            nodes,
            adjacency,
            n_edges: n_edges / 2,
            construction: None,
        }
    }

    pub fn construction(&self) -> Option<Construction> {
        self.construction
    }

    pub fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.n_edges
    }

    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.adjacency[id as usize]
    }

    pub fn degree(&self, id: u32) -> usize {
        self.adjacency[id as usize].len()
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.nodes.id(a), self.nodes.id(b)) {
            (Some(i), Some(j)) => self.neighbors(i).binary_search(&j).is_ok(),
            _ => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, nbrs)| {
            let u = u as u32;
            nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }

    /// Edges as word pairs, each pair sorted.
    pub fn word_edges(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.edges()
            .map(|(u, v)| (self.nodes.word(u), self.nodes.word(v)))
    }

    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, b) in self.word_edges() {
            writeln!(out, "{a}\t{b}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<edge list>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => pairs.push((a.to_string(), b.to_string())),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "edge list line {}: expected two tab-separated words",
                        n + 1
                    )))
                }
            }
        }
        Ok(Self::from_edges(
            pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        ))
    }
}

fn row_pairs<'a>(
    words: &[&'a str],
    first_slot: Option<&'a str>,
    construction: Construction,
) -> Vec<(&'a str, &'a str)> {
    let cue = words[0];
    match construction {
        Construction::R1 => first_slot.map(|r| vec![(cue, r)]).unwrap_or_default(),
        Construction::R123 => words[1..].iter().map(|&r| (cue, r)).collect(),
        Construction::Chain => words.windows(2).map(|w| (w[0], w[1])).collect(),
        Construction::Clique => {
            let mut out = Vec::new();
            for (i, &a) in words.iter().enumerate() {
                for &b in &words[i + 1..] {
                    out.push((a, b));
                }
            }
            out
        }
    }
}

/// Builds the pairwise association graph. The graph is always simple, so
/// repeated pairs from different participants collapse to one edge.
pub fn build_pairwise(
    responses: &ResponseTable,
    construction: Construction,
) -> Result<PairwiseGraph> {
    if responses.is_empty() {
        return Err(Error::Empty("response table"));
    }
    let mut pairs = Vec::new();
    for row in &responses.rows {
        let words: Vec<&str> = row.words().collect();
        pairs.extend(row_pairs(&words, row.responses[0].as_deref(), construction));
    }
    let mut g = PairwiseGraph::from_edges(pairs.iter().copied());
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    g.construction = Some(construction);
    Ok(g)
}

/// Direct neighbours of `word` plus `word` itself, sorted.
pub fn ego_neighborhood(graph: &PairwiseGraph, word: &str) -> Result<Vec<String>> {
    let id = graph
        .nodes
        .id(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let mut ids: Vec<u32> = graph.neighbors(id).to_vec();
    ids.push(id);
    ids.sort_unstable();
    Ok(ids
        .into_iter()
        .map(|i| graph.nodes.word(i).to_string())
        .collect())
}

/// Node set plus a multiset of hyperedges (each a sorted set of node ids).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    nodes: NodeIndex,
    edges: Vec<Vec<u32>>,
    incidence: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Builds from word groups; duplicate words inside a group collapse and
    /// groups of fewer than two distinct words are dropped.
    pub fn from_groups<S: AsRef<str>>(groups: &[Vec<S>], dedup: bool) -> Self {
        let sets: Vec<BTreeSet<&str>> = groups
            .iter()
            .map(|g| g.iter().map(AsRef::as_ref).collect::<BTreeSet<&str>>())
            .filter(|s| s.len() >= 2)
            .collect();
        let nodes = NodeIndex::from_words(sets.iter().flat_map(|s| s.iter().copied()));
        let mut edges: Vec<Vec<u32>> = Vec::with_capacity(sets.len());
        let mut seen = BTreeSet::new();
        for s in sets {
            // BTreeSet order == id order since ids are assigned lexicographically
            let e: Vec<u32> = s.iter().map(|w| nodes.id(w).unwrap()).collect();
            if dedup && !seen.insert(e.clone()) {
                continue;
            }
            edges.push(e);
        }
        let mut incidence = vec![Vec::new(); nodes.len()];
        for (k, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v as usize].push(k as u32);
            }
        }
        Hypergraph {
            nodes,
            edges,
            incidence,
        }
    }

    pub fn nodes(&self) -> &NodeIndex {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, k: usize) -> &[u32] {
        &self.edges[k]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Ids of hyperedges containing node `id`, in construction order.
    pub fn incident(&self, id: u32) -> &[u32] {
        &self.incidence[id as usize]
    }

    pub fn edge_words(&self, k: usize) -> Vec<&str> {
        self.edges[k].iter().map(|&v| self.nodes.word(v)).collect()
    }

    pub fn write_hyperedges<W: Write>(&self, mut out: W) -> io::Result<()> {
        for k in 0..self.edges.len() {
            writeln!(out, "{}", self.edge_words(k).join("\t"))?;
        }
        Ok(())
    }

    pub fn read_hyperedges<R: BufRead>(input: R) -> Result<Self> {
        let mut groups = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::io("<hyperedge list>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            groups.push(line.split('\t').map(str::to_string).collect::<Vec<_>>());
        }
        Ok(Self::from_groups(&groups, false))
    }
}

/// One hyperedge per association row: the cue together with its responses.
pub fn build_hypergraph(responses: &ResponseTable, dedup: bool) -> Result<Hypergraph> {
    let groups: Vec<Vec<&str>> = responses.rows.iter().map(|r| r.words().collect()).collect();
    let h = Hypergraph::from_groups(&groups, dedup);
    if h.edge_count() == 0 {
        return Err(Error::Empty("hypergraph"));
    }
    Ok(h)
}

/// All hyperedges containing a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarEgo {
    pub center: String,
    pub hyperedges: Vec<Vec<String>>,
}

impl StarEgo {
    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }
}

pub fn star_ego(hypergraph: &Hypergraph, word: &str) -> Result<StarEgo> {
    let id = hypergraph
        .nodes
        .id(word)
        .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
    let hyperedges = hypergraph
        .incident(id)
        .iter()
        .map(|&k| {
            hypergraph
                .edge_words(k as usize)
                .into_iter()
                .map(str::to_string)
                .collect()
        })
        .collect();
    Ok(StarEgo {
        center: word.to_string(),
        hyperedges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::ResponseRow;

    fn rows(spec: &[(&str, &[&str])]) -> ResponseTable {
        ResponseTable {
            rows: spec
                .iter()
                .map(|(c, r)| ResponseRow::new(c, r).unwrap())
                .collect(),
        }
    }

    fn edge_set(g: &PairwiseGraph) -> BTreeSet<(String, String)> {
        g.word_edges()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn pairs(p: &[(&str, &str)]) -> BTreeSet<(String, String)> {
        p.iter()
            .map(|&(a, b)| {
                let (a, b) = if a < b { (a, b) } else { (b, a) };
                (a.to_string(), b.to_string())
            })
            .collect()
    }

    #[test]
    fn r123_hand_enumeration() {
        let t = rows(&[
            ("dog", &["box", "cat"]),
            ("zebra", &["dog", "box", "elephant"]),
        ]);
        let g = build_pairwise(&t, Construction::R123).unwrap();
        assert_eq!(
            edge_set(&g),
            pairs(&[
                ("dog", "box"),
                ("dog", "cat"),
                ("zebra", "dog"),
                ("zebra", "box"),
                ("zebra", "elephant")
            ])
        );
    }

    #[test]
    fn chain_and_clique_hand_enumeration() {
        let t = rows(&[("zebra", &["dog", "box", "elephant"])]);
        let chain = build_pairwise(&t, Construction::Chain).unwrap();
        assert_eq!(
            edge_set(&chain),
            pairs(&[("zebra", "dog"), ("dog", "box"), ("box", "elephant")])
        );
        let clique = build_pairwise(&t, Construction::Clique).unwrap();
        assert_eq!(clique.edge_count(), 6);
        let r1 = build_pairwise(&t, Construction::R1).unwrap();
        assert_eq!(edge_set(&r1), pairs(&[("zebra", "dog")]));
    }

    #[test]
    fn single_pair_any_construction() {
        let t = rows(&[("a", &["b"])]);
        for c in Construction::ALL {
            let g = build_pairwise(&t, c).unwrap();
            assert_eq!(edge_set(&g), pairs(&[("a", "b")]), "{c}");
        }
    }

    #[test]
    fn r1_requires_first_slot() {
        let t = ResponseTable {
            rows: vec![
                ResponseRow {
                    cue: "a".into(),
                    responses: [None, Some("b".into()), None],
                },
                ResponseRow::new("c", &["d"]).unwrap(),
            ],
        };
        let g = build_pairwise(&t, Construction::R1).unwrap();
        assert_eq!(edge_set(&g), pairs(&[("c", "d")]));
        assert_eq!(g.node_count(), 2);
    }

    #[test]
    fn self_loops_dropped() {
        let t = rows(&[("a", &["a", "b"])]);
        let g = build_pairwise(&t, Construction::R123).unwrap();
        assert_eq!(edge_set(&g), pairs(&[("a", "b")]));
        let h = build_hypergraph(&t, false).unwrap();
        assert_eq!(h.edge_words(0), ["a", "b"]);
        assert!(matches!(
            build_pairwise(&rows(&[("a", &["a"])]), Construction::R123),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn empty_table_is_fatal() {
        assert!(build_pairwise(&ResponseTable::default(), Construction::R1).is_err());
        assert!(build_hypergraph(&ResponseTable::default(), false).is_err());
    }

    #[test]
    fn unknown_construction_rejected() {
        assert!("star".parse::<Construction>().is_err());
        assert_eq!("R123".parse::<Construction>().unwrap(), Construction::R123);
    }

    #[test]
    fn hypergraph_dedup_collapses_identical_sets() {
        let t = rows(&[("a", &["b", "c"]), ("a", &["c", "b"]), ("b", &["a", "c"])]);
        assert_eq!(build_hypergraph(&t, false).unwrap().edge_count(), 3);
        assert_eq!(build_hypergraph(&t, true).unwrap().edge_count(), 1);
    }

    #[test]
    fn ego_of_isolated_and_unknown() {
        let g = PairwiseGraph::from_edges([("a", "b")]);
        assert_eq!(ego_neighborhood(&g, "a").unwrap(), ["a", "b"]);
        assert!(matches!(
            ego_neighborhood(&g, "zz"),
            Err(Error::UnknownWord(_))
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let t = rows(&[
            ("dog", &["box", "cat"]),
            ("zebra", &["dog", "box", "elephant"]),
        ]);
        let g = build_pairwise(&t, Construction::Clique).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let back = PairwiseGraph::read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(edge_set(&back), edge_set(&g));

        let h = build_hypergraph(&t, false).unwrap();
        let mut buf = Vec::new();
        h.write_hyperedges(&mut buf).unwrap();
        assert_eq!(Hypergraph::read_hyperedges(buf.as_slice()).unwrap(), h);
    }
}
