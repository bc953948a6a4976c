//! Within-context feature homogeneity: per-context mean and standard
//! deviation, compared against a null model that permutes feature values
//! across the vocabulary while keeping the structure fixed.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feature::FeatureName;
use crate::lexicon::Lexicon;
use crate::network::{Hypergraph, PairwiseGraph};
use crate::stats::{mean, population_std, quantile_sorted};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContextMoments {
    pub context_id: usize,
    pub feature: FeatureName,
    pub mean: f64,
    /// population standard deviation
    pub std: f64,
    pub size: usize,
}

/// Ego-network of every graph node (node included), as lexicon indices.
pub fn ego_contexts(graph: &PairwiseGraph, lexicon: &Lexicon) -> Result<Vec<Vec<usize>>> {
    let map = lexicon_ids(graph.nodes().words(), lexicon)?;
    Ok((0..graph.node_count())
        .map(|v| {
            let mut c: Vec<usize> = graph
                .neighbors(v as u32)
                .iter()
                .map(|&u| map[u as usize])
                .collect();
            c.push(map[v]);
            c
        })
        .collect())
}

/// Every hyperedge, as lexicon indices.
pub fn hyperedge_contexts(h: &Hypergraph, lexicon: &Lexicon) -> Result<Vec<Vec<usize>>> {
    let map = lexicon_ids(h.nodes().words(), lexicon)?;
    Ok(h.edges()
        .iter()
        .map(|e| e.iter().map(|&v| map[v as usize]).collect())
        .collect())
}

fn lexicon_ids(words: &[String], lexicon: &Lexicon) -> Result<Vec<usize>> {
    words
        .iter()
        .map(|w| {
            lexicon
                .index_of(w)
                .ok_or_else(|| Error::UnknownWord(w.clone()))
        })
        .collect()
}

/// Moments of `values` (indexed like the lexicon) over each context.
/// Empty contexts are skipped; the second element counts them.
pub fn context_moments(
    contexts: &[Vec<usize>],
    values: &[f64],
    feature: FeatureName,
) -> (Vec<ContextMoments>, usize) {
    let mut skipped = 0;
    let mut out = Vec::with_capacity(contexts.len());
    let mut buf = Vec::new();
    for (id, c) in contexts.iter().enumerate() {
        if c.is_empty() {
            skipped += 1;
            continue;
        }
        buf.clear();
        buf.extend(c.iter().map(|&i| values[i]));
        out.push(ContextMoments {
            context_id: id,
            feature,
            mean: mean(&buf),
            std: population_std(&buf),
            size: c.len(),
        });
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} empty contexts");
    }
    (out, skipped)
}

/// A relabeling of feature values: word `i` receives the value of word
/// `permutation[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NullAssignment {
    pub permutation: Vec<usize>,
    pub seed: u64,
    pub stream: u64,
}

impl NullAssignment {
    pub fn identity(n: usize) -> Self {
        NullAssignment {
            permutation: (0..n).collect(),
            seed: 0,
            stream: 0,
        }
    }

    pub fn random(n: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut permutation: Vec<usize> = (0..n).collect();
        permutation.shuffle(&mut rng);
        NullAssignment {
            permutation,
            seed,
            stream,
        }
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.permutation.iter().map(|&j| values[j]).collect()
    }
}

/// Moments recomputed under `n_permutations` independent value shuffles.
pub fn null_shuffle_moments(
    contexts: &[Vec<usize>],
    lexicon: &Lexicon,
    feature: FeatureName,
    n_permutations: usize,
    seed: u64,
) -> Result<Vec<(NullAssignment, Vec<ContextMoments>)>> {
    if n_permutations == 0 {
        return Err(Error::InvalidInput("need at least one permutation".into()));
    }
    let values = lexicon.column(feature);
    Ok((0..n_permutations as u64)
        .map(|p| {
            let assignment = NullAssignment::random(values.len(), seed, p);
            let (m, _) = context_moments(contexts, &assignment.apply(&values), feature);
            (assignment, m)
        })
        .collect())
}

/// Mean std of contexts whose mean lies in the bottom or top decile.
pub fn extreme_tail_std(moments: &[ContextMoments]) -> f64 {
    let mut means: Vec<f64> = moments.iter().map(|m| m.mean).collect();
    means.sort_by(f64::total_cmp);
    let lo = quantile_sorted(&means, 0.1);
    let hi = quantile_sorted(&means, 0.9);
    let tail: Vec<f64> = moments
        .iter()
        .filter(|m| m.mean <= lo || m.mean >= hi)
        .map(|m| m.std)
        .collect();
    mean(&tail)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremesGap {
    pub feature: FeatureName,
    /// empirical tail std minus the null ensemble's average tail std
    pub statistic: f64,
    pub empirical_tail_std: f64,
    pub null_tail_std: Vec<f64>,
    pub null_mean: f64,
    pub null_sd: f64,
    /// `statistic / null_sd`
    pub z: f64,
    /// whether the empirical tail std sits inside the null's central 95%
    pub within_null_95: bool,
}

pub const MIN_CONTEXTS: usize = 20;
pub const MIN_PERMUTATIONS: usize = 10;

/// Negative values mean contexts with extreme average values are more
/// homogeneous than the shuffled null predicts.
pub fn extremes_gap_statistic(
    empirical: &[ContextMoments],
    null_ensemble: &[Vec<ContextMoments>],
    feature: FeatureName,
) -> Result<ExtremesGap> {
    if empirical.len() < MIN_CONTEXTS {
        return Err(Error::TooFewContexts {
            need: MIN_CONTEXTS,
            got: empirical.len(),
        });
    }
    if null_ensemble.len() < MIN_PERMUTATIONS {
        return Err(Error::InvalidInput(format!(
            "need at least {MIN_PERMUTATIONS} null permutations, got {}",
            null_ensemble.len()
        )));
    }
    let emp = extreme_tail_std(empirical);
    let null: Vec<f64> = null_ensemble.iter().map(|m| extreme_tail_std(m)).collect();
    let null_mean = mean(&null);
    let null_sd = {
        let n = null.len() as f64;
        (null.iter().map(|x| (x - null_mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let mut sorted = null.clone();
    sorted.sort_by(f64::total_cmp);
    let (q_lo, q_hi) = (
        quantile_sorted(&sorted, 0.025),
        quantile_sorted(&sorted, 0.975),
    );
    let statistic = emp - null_mean;
    Ok(ExtremesGap {
        feature,
        statistic,
        empirical_tail_std: emp,
        null_tail_std: null,
        null_mean,
        null_sd,
        z: if null_sd > 0.0 {
            statistic / null_sd
        } else {
            0.0
        },
        within_null_95: (q_lo..=q_hi).contains(&emp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::LexiconEntry;
    use crate::N_FEATURES;

    fn lex_with_length(words: &[&str]) -> Lexicon {
        Lexicon::from_entries(words.iter().map(|w| {
            let mut features = [1.0; N_FEATURES];
            features[FeatureName::Length.index()] = w.chars().count() as f64;
            LexiconEntry {
                word: w.to_string(),
                features,
            }
        }))
        .unwrap()
    }

    #[test]
    fn five_word_star_moments() {
        let h = Hypergraph::from_groups(
            &[
                vec!["dog", "box", "cat"],
                vec!["zebra", "dog", "box"],
                vec!["dog", "zebra", "elephant"],
            ],
            false,
        );
        let lex = lex_with_length(&["dog", "box", "cat", "zebra", "elephant"]);
        let ctx = hyperedge_contexts(&h, &lex).unwrap();
        let (m, skipped) =
            context_moments(&ctx, &lex.column(FeatureName::Length), FeatureName::Length);
        assert_eq!(skipped, 0);
        let expect = [
            (3.0, 0.0),
            (11.0 / 3.0, (8.0f64 / 9.0).sqrt()),
            (16.0 / 3.0, (38.0f64 / 9.0).sqrt()),
        ];
        for (got, (mu, sd)) in m.iter().zip(expect) {
            assert!((got.mean - mu).abs() < 1e-12);
            assert!((got.std - sd).abs() < 1e-12);
        }
    }

    #[test]
    fn singleton_and_empty_contexts() {
        let values = [4.0, 7.0];
        let (m, skipped) = context_moments(&[vec![1], vec![]], &values, FeatureName::Aoa);
        assert_eq!(skipped, 1);
        assert_eq!((m[0].mean, m[0].std, m[0].size), (7.0, 0.0, 1));
    }

    #[test]
    fn identity_permutation_reproduces_empirical() {
        let lex = lex_with_length(&["a", "bb", "ccc", "dddd"]);
        let ctx = vec![vec![0, 1], vec![1, 2, 3], vec![0, 3]];
        let values = lex.column(FeatureName::Length);
        let id = NullAssignment::identity(values.len());
        assert_eq!(
            context_moments(&ctx, &id.apply(&values), FeatureName::Length),
            context_moments(&ctx, &values, FeatureName::Length)
        );
    }

    #[test]
    fn null_is_deterministic_per_seed() {
        let lex = lex_with_length(&["a", "bb", "ccc", "dddd", "eeeee"]);
        let ctx = vec![vec![0, 1], vec![2, 3, 4]];
        let a = null_shuffle_moments(&ctx, &lex, FeatureName::Length, 3, 9).unwrap();
        let b = null_shuffle_moments(&ctx, &lex, FeatureName::Length, 3, 9).unwrap();
        assert_eq!(a, b);
        assert!(null_shuffle_moments(&ctx, &lex, FeatureName::Length, 0, 9).is_err());
    }

    #[test]
    fn too_few_contexts_is_an_error() {
        let m = vec![
            ContextMoments {
                context_id: 0,
                feature: FeatureName::Aoa,
                mean: 1.0,
                std: 0.0,
                size: 1
            };
            5
        ];
        let null = vec![m.clone(); 10];
        assert!(matches!(
            extremes_gap_statistic(&m, &null, FeatureName::Aoa),
            Err(Error::TooFewContexts { .. })
        ));
    }
}
