//! CART regression trees grown by weighted variance reduction.
//!
//! Rows are presorted once per feature; each split partitions those orders
//! stably, so a node costs O(rows × features). Sample weights carry both
//! bootstrap multiplicities and boosting weights; zero-weight rows are
//! dropped before growing.

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt() as usize).max(1),
            MaxFeatures::Count(k) => k.min(n_features),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small to split
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::All,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, value: String| {
            Err(Error::InvalidHyperparameter {
                name: name.into(),
                value,
            })
        };
        if self.max_depth == Some(0) {
            return bad("max_depth", "0".into());
        }
        if self.min_samples_split < 2 {
            return bad("min_samples_split", self.min_samples_split.to_string());
        }
        if self.min_samples_leaf < 1 {
            return bad("min_samples_leaf", self.min_samples_leaf.to_string());
        }
        if self.max_features == MaxFeatures::Count(0) {
            return bad("max_features", "0".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

impl RegressionTree {
    /// Unweighted fit; draws no randomness unless features are subsampled.
    pub fn fit<R: Rng>(
        x: &[Vec<f64>],
        y: &[f64],
        params: &TreeParams,
        rng: &mut R,
    ) -> Result<Self> {
        Self::fit_weighted(x, y, &vec![1.0; y.len()], params, rng)
    }

    pub fn fit_weighted<R: Rng>(
        x: &[Vec<f64>],
        y: &[f64],
        weights: &[f64],
        params: &TreeParams,
        rng: &mut R,
    ) -> Result<Self> {
        params.validate()?;
        if x.len() != y.len() || y.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let active: Vec<u32> = (0..y.len() as u32)
            .filter(|&i| weights[i as usize] > 0.0)
            .collect();
        if active.is_empty() {
            return Err(Error::Empty("rows with positive weight"));
        }
        let d = x[0].len();
        let orders: Vec<Vec<u32>> = (0..d)
            .map(|f| {
                let mut o = active.clone();
                o.sort_by(|&a, &b| {
                    x[a as usize][f]
                        .total_cmp(&x[b as usize][f])
                        .then(a.cmp(&b))
                });
                o
            })
            .collect();
        let mut builder = Builder {
            x,
            y,
            w: weights,
            params,
            m_try: params.max_features.resolve(d),
            rng,
            nodes: Vec::new(),
            goes_left: vec![false; y.len()],
        };
        builder.grow(orders, active, 0);
        Ok(RegressionTree {
            nodes: builder.nodes,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut k = 0;
        loop {
            match self.nodes[k] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    k = if row[feature] <= threshold {
                        left
                    } else {
                        right
                    }
                }
            }
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], k: usize) -> usize {
            match nodes[k] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Builder<'a, R> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    w: &'a [f64],
    params: &'a TreeParams,
    m_try: usize,
    rng: &'a mut R,
    nodes: Vec<Node>,
    goes_left: Vec<bool>,
}

struct SplitChoice {
    feature: usize,
    threshold: f64,
}

impl<R: Rng> Builder<'_, R> {
    /// `rows` lists the node's rows in index order; returns the node id.
    fn grow(&mut self, orders: Vec<Vec<u32>>, rows: Vec<u32>, depth: usize) -> usize {
        let (mut sw, mut swy) = (0.0, 0.0);
        for &i in &rows {
            sw += self.w[i as usize];
            swy += self.w[i as usize] * self.y[i as usize];
        }
        let value = swy / sw;
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value });

        let n = rows.len();
        let first = self.y[rows[0] as usize];
        let pure = rows.iter().all(|&i| self.y[i as usize] == first);
        if pure
            || self.params.max_depth.is_some_and(|m| depth >= m)
            || n < self.params.min_samples_split
            || n < 2 * self.params.min_samples_leaf
        {
            return id;
        }
        let Some(split) = self.best_split(&orders, sw, swy) else {
            return id;
        };

        for &i in &rows {
            self.goes_left[i as usize] = self.x[i as usize][split.feature] <= split.threshold;
        }
        let (mut left_orders, mut right_orders) = (
            Vec::with_capacity(orders.len()),
            Vec::with_capacity(orders.len()),
        );
        for o in orders {
            let (l, r): (Vec<u32>, Vec<u32>) =
                o.into_iter().partition(|&i| self.goes_left[i as usize]);
            left_orders.push(l);
            right_orders.push(r);
        }
        let (left_rows, right_rows): (Vec<u32>, Vec<u32>) =
            rows.into_iter().partition(|&i| self.goes_left[i as usize]);
        let left = self.grow(left_orders, left_rows, depth + 1);
        let right = self.grow(right_orders, right_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&mut self, orders: &[Vec<u32>], sw: f64, swy: f64) -> Option<SplitChoice> {
        let d = orders.len();
        let features: Vec<usize> = if self.m_try >= d {
            (0..d).collect()
        } else {
            let mut f = index::sample(self.rng, d, self.m_try).into_vec();
            f.sort_unstable();
            f
        };
        let min_leaf = self.params.min_samples_leaf;
        let parent = swy * swy / sw;
        let mut best_score = parent + 1e-12 * parent.abs().max(1.0);
        let mut best = None;
        for f in features {
            let order = &orders[f];
            let n = order.len();
            let (mut wl, mut sl) = (0.0, 0.0);
            for pos in 0..n - 1 {
                let i = order[pos] as usize;
                wl += self.w[i];
                sl += self.w[i] * self.y[i];
                let n_left = pos + 1;
                if n_left < min_leaf {
                    continue;
                }
                if n - n_left < min_leaf {
                    break;
                }
                let (xv, xn) = (self.x[i][f], self.x[order[pos + 1] as usize][f]);
                if xn <= xv {
                    continue;
                }
                let (wr, sr) = (sw - wl, swy - sl);
                let score = sl * sl / wl + sr * sr / wr;
                if score > best_score {
                    best_score = score;
                    let mid = xv + (xn - xv) / 2.0;
                    best = Some(SplitChoice {
                        feature: f,
                        threshold: if mid < xn { mid } else { xv },
                    });
                }
            }
        }
        best
    }
}
