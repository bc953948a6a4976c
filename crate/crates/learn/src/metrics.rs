//! Regression error measures and fold summaries.

use crate::error::{Error, Result};

fn check(y_true: &[f64], y_pred: &[f64]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::Empty("metric inputs"));
    }
    Ok(())
}

/// Residual sum of squares.
pub fn rss(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check(y_true, y_pred)?;
    Ok(y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum())
}

/// Total sum of squares around the mean of `y_true`.
pub fn tss(y_true: &[f64]) -> Result<f64> {
    if y_true.is_empty() {
        return Err(Error::Empty("metric inputs"));
    }
    let m = y_true.iter().sum::<f64>() / y_true.len() as f64;
    Ok(y_true.iter().map(|t| (t - m) * (t - m)).sum())
}

pub fn rmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    Ok((rss(y_true, y_pred)? / y_true.len() as f64).sqrt())
}

/// Coefficient of determination; errors when `y_true` is constant.
pub fn r2(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    let rss = rss(y_true, y_pred)?;
    let tss = tss(y_true)?;
    if y_true.len() < 2 || tss == 0.0 {
        return Err(Error::ConstantTarget);
    }
    Ok(1.0 - rss / tss)
}

/// Mean, sample standard deviation and standard error of fold scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldSummary {
    pub mean: f64,
    pub std: f64,
    pub se: f64,
}

pub fn summarize(values: &[f64]) -> FoldSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    FoldSummary {
        mean,
        std,
        se: std / n.sqrt(),
    }
}
