//! Ordinary least squares with an intercept, solved through an SVD so that
//! rank-deficient designs fall back to the minimum-norm solution.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub rank_deficient: bool,
}

impl LinearModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let n = x.len();
        let d = x.first().ok_or(Error::Empty("training rows"))?.len();
        // centering decouples the intercept and improves conditioning
        let x_mean: Vec<f64> = (0..d)
            .map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let y_mean = y.iter().sum::<f64>() / n as f64;
        if d == 0 {
            return Ok(LinearModel {
                coefficients: Vec::new(),
                intercept: y_mean,
                rank_deficient: false,
            });
        }
        let a = DMatrix::from_fn(n, d, |i, j| x[i][j] - x_mean[j]);
        let b = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));
        let svd = a.svd(true, true);
        let s_max = svd.singular_values.max();
        let tol = s_max * (n.max(d) as f64) * f64::EPSILON;
        let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
        let rank_deficient = rank < d;
        if rank_deficient {
            log::warn!("design matrix has rank {rank} < {d}; using the pseudoinverse solution");
        }
        let w = svd
            .solve(&b, tol)
            .map_err(|e| Error::InvalidHyperparameter {
                name: "svd".into(),
                value: e.to_string(),
            })?;
        let coefficients: Vec<f64> = w.iter().copied().collect();
        let intercept = y_mean
            - coefficients
                .iter()
                .zip(&x_mean)
                .map(|(c, m)| c * m)
                .sum::<f64>();
        Ok(LinearModel {
            coefficients,
            intercept,
            rank_deficient,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }
}
