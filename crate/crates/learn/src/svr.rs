//! Linear epsilon-insensitive support vector regression.
//!
//! Minimizes `λ/2 ‖w‖² + mean_i max(0, |y_i − w·x_i − b| − ε)` with
//! `λ = 1 / (C n)` by full-batch subgradient descent. The bias is not
//! regularized and the best iterate seen is returned.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub max_iter: usize,
    /// stop once the objective improves by less than this over a window
    pub tol: f64,
    pub step: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 1.0,
            epsilon: 0.1,
            max_iter: 4000,
            tol: 1e-9,
            step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearSvr {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

const WINDOW: usize = 200;

impl LinearSvr {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Result<Self> {
        let bad = |name: &str, v: f64| {
            Err(Error::InvalidHyperparameter {
                name: name.into(),
                value: v.to_string(),
            })
        };
        if !(params.c > 0.0 && params.c.is_finite()) {
            return bad("C", params.c);
        }
        if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
            return bad("epsilon", params.epsilon);
        }
        if params.max_iter == 0 {
            return bad("max_iter", 0.0);
        }
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let n = y.len();
        let d = x.first().ok_or(Error::Empty("training rows"))?.len();
        let lambda = 1.0 / (params.c * n as f64);
        let objective = |w: &[f64], b: f64| {
            let hinge: f64 = x
                .iter()
                .zip(y)
                .map(|(r, t)| ((t - dot(w, r) - b).abs() - params.epsilon).max(0.0))
                .sum();
            0.5 * lambda * dot(w, w) + hinge / n as f64
        };
        // start from the median so the bias begins inside the bulk of the data
        let mut sorted = y.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut w = vec![0.0; d];
        let mut b = sorted[n / 2];
        let mut best = (w.clone(), b, objective(&w, b));
        let mut window_start = best.2;
        let mut converged = false;
        let mut iterations = 0;
        let mut gw = vec![0.0; d];
        for t in 1..=params.max_iter {
            iterations = t;
            gw.iter_mut().zip(&w).for_each(|(g, wi)| *g = lambda * wi);
            let mut gb = 0.0;
            for (r, target) in x.iter().zip(y) {
                let resid = target - dot(&w, r) - b;
                if resid.abs() > params.epsilon {
                    let s = resid.signum() / n as f64;
                    gw.iter_mut().zip(r).for_each(|(g, v)| *g -= s * v);
                    gb -= s;
                }
            }
            let norm = (dot(&gw, &gw) + gb * gb).sqrt();
            if norm == 0.0 {
                converged = true;
                break;
            }
            let eta = params.step / (t as f64).sqrt();
            w.iter_mut().zip(&gw).for_each(|(wi, g)| *wi -= eta * g);
            b -= eta * gb;
            let obj = objective(&w, b);
            if obj < best.2 {
                best = (w.clone(), b, obj);
            }
            if t % WINDOW == 0 {
                if window_start - best.2 < params.tol {
                    converged = true;
                    break;
                }
                window_start = best.2;
            }
        }
        if !converged {
            log::warn!(
                "linear SVR did not converge in {} iterations; returning the best iterate",
                params.max_iter
            );
        }
        Ok(LinearSvr {
            coefficients: best.0,
            intercept: best.1,
            objective: best.2,
            iterations,
            converged,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + dot(&self.coefficients, row)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![i as f64 / (n - 1) as f64 * 2.0 - 1.0])
            .collect();
        let y = x.iter().map(|r| 2.0 * r[0] + 1.0).collect();
        (x, y)
    }

    #[test]
    fn tube_data_gives_zero_hinge() {
        let (x, y) = line(21);
        let eps = 0.05;
        let p = SvrParams {
            c: 100.0,
            epsilon: eps,
            max_iter: 20000,
            ..SvrParams::default()
        };
        let m = LinearSvr::fit(&x, &y, &p).unwrap();
        for (r, t) in x.iter().zip(&y) {
            assert!(
                (m.predict_row(r) - t).abs() <= eps + 1e-3,
                "{} vs {t}",
                m.predict_row(r)
            );
        }
    }

    #[test]
    fn scaling_c_keeps_predictions_inside_the_same_tube() {
        let (x, y) = line(15);
        let eps = 0.02;
        let fit = |c| {
            LinearSvr::fit(
                &x,
                &y,
                &SvrParams {
                    c,
                    epsilon: eps,
                    max_iter: 20000,
                    ..SvrParams::default()
                },
            )
            .unwrap()
        };
        let (a, b) = (fit(50.0), fit(500.0));
        for r in &x {
            assert!((a.predict_row(r) - b.predict_row(r)).abs() <= 2.0 * eps + 2e-3);
        }
    }

    #[test]
    fn large_c_zero_epsilon_approaches_lad() {
        let x: Vec<Vec<f64>> = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
            .iter()
            .map(|&v| vec![v])
            .collect();
        let y = [0.3, 0.9, 2.4, 2.2, 4.6, 4.1, 9.0];
        let m = LinearSvr::fit(
            &x,
            &y,
            &SvrParams {
                c: 1e4,
                epsilon: 0.0,
                max_iter: 40000,
                ..SvrParams::default()
            },
        )
        .unwrap();
        let mae = |a: f64, b: f64| {
            x.iter()
                .zip(&y)
                .map(|(r, t)| (t - a * r[0] - b).abs())
                .sum::<f64>()
                / 7.0
        };
        let mut grid_best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                grid_best = grid_best.min(mae(i as f64 * 0.01, -2.0 + j as f64 * 0.01));
            }
        }
        let got = mae(m.coefficients[0], m.intercept);
        assert!(got <= grid_best + 0.01, "svr {got} vs grid {grid_best}");
    }

    #[test]
    fn rejects_bad_params() {
        let (x, y) = line(5);
        for p in [
            SvrParams {
                c: 0.0,
                ..SvrParams::default()
            },
            SvrParams {
                epsilon: -1.0,
                ..SvrParams::default()
            },
        ] {
            assert!(LinearSvr::fit(&x, &y, &p).is_err());
        }
    }
}
