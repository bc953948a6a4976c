//! Residual scatter data over chosen predictor pairs.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::cv::PredictionRecord;
use crate::dataset::Dataset;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub word: String,
    pub x_feature: String,
    pub y_feature: String,
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

/// One point per (pair, predicted word). Words absent from `ds` are skipped.
pub fn residual_report(
    records: &[PredictionRecord],
    ds: &Dataset,
    pairs: &[(usize, usize)],
) -> Vec<ResidualPoint> {
    let row: HashMap<&str, usize> = ds
        .words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();
    let missing = records
        .iter()
        .filter(|r| !row.contains_key(r.word.as_str()))
        .count();
    if missing > 0 {
        log::warn!("{missing} predicted words are missing from the feature matrix");
    }
    let mut out = Vec::with_capacity(records.len() * pairs.len());
    for &(fx, fy) in pairs {
        for r in records {
            let Some(&i) = row.get(r.word.as_str()) else {
                continue;
            };
            out.push(ResidualPoint {
                word: r.word.clone(),
                x_feature: ds.feature_names[fx].clone(),
                y_feature: ds.feature_names[fy].clone(),
                x: ds.x[i][fx],
                y: ds.x[i][fy],
                residual: r.residual,
            });
        }
    }
    out
}

pub fn write_residuals_csv<W: Write>(points: &[ResidualPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["word", "x_feature", "y_feature", "x", "y", "residual"])?;
    for p in points {
        w.write_record([
            p.word.clone(),
            p.x_feature.clone(),
            p.y_feature.clone(),
            p.x.to_string(),
            p.y.to_string(),
            p.residual.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
