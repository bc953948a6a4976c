use hyperlex::aggregate::FeatureMatrix;

use crate::error::{Error, Result};

/// Row-major design matrix with one target value and one word per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub words: Vec<String>,
    pub feature_names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(
        words: Vec<String>,
        feature_names: Vec<String>,
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
    ) -> Result<Self> {
        if x.len() != y.len() || words.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if let Some(bad) = x.iter().find(|r| r.len() != feature_names.len()) {
            return Err(Error::RaggedRows {
                expected: feature_names.len(),
                found: bad.len(),
            });
        }
        Ok(Dataset {
            words,
            feature_names,
            x,
            y,
        })
    }

    /// Predictor columns keep the matrix's `<feature>_<strategy>` naming.
    pub fn from_matrix(m: &FeatureMatrix) -> Result<Self> {
        let tag = m.strategy.tag();
        let names = m
            .predictors
            .iter()
            .map(|f| format!("{}_{tag}", f.as_str()))
            .collect();
        Dataset::new(
            m.words.clone(),
            names,
            m.rows.clone(),
            m.target_values.clone(),
        )
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            words: idx.iter().map(|&i| self.words[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }
}
