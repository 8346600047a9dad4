//! Positive LARS with the lasso modification, in Gram form.
//!
//! Solves `min_{beta >= 0} 1/2 ||r - P beta||^2 + lambda sum_k beta_k` for
//! every `lambda`; at each knot the active correlations `c - G beta` all
//! equal `lambda`.

use serde::{Deserialize, Serialize};

use super::{solve_spd, submatrix, LocalDesign, NormalEquations};
use crate::error::{Error, Result};

const DENOM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LarsPath {
    /// Decreasing, starting at `lambda_max` and ending at 0 (or at the last
    /// reachable knot when the correlations vanish earlier).
    pub knots: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
}

impl LarsPath {
    pub fn lambda_max(&self) -> f64 {
        self.knots[0]
    }

    /// Coefficients at `lambda`, linear between knots.
    pub fn coefficients_at(&self, lambda: f64) -> Vec<f64> {
        if lambda >= self.knots[0] {
            return self.betas[0].clone();
        }
        for w in 1..self.knots.len() {
            let (hi, lo) = (self.knots[w - 1], self.knots[w]);
            if lambda >= lo {
                let t = if hi > lo { (hi - lambda) / (hi - lo) } else { 1.0 };
                return self.betas[w - 1]
                    .iter()
                    .zip(&self.betas[w])
                    .map(|(a, b)| (a + t * (b - a)).max(0.0))
                    .collect();
            }
        }
        self.betas.last().expect("path has a first knot").clone()
    }

    pub fn active_at(&self, lambda: f64) -> Vec<usize> {
        self.coefficients_at(lambda)
            .iter()
            .enumerate()
            .filter(|(_, b)| **b > 0.0)
            .map(|(k, _)| k)
            .collect()
    }
}

pub fn lars_positive_path(design: &LocalDesign) -> Result<LarsPath> {
    if let Some(k) = design.predictors.iter().position(|p| p.iter().all(|&v| v == 0.0)) {
        return Err(Error::DegeneratePredictor(k));
    }
    lars_positive_path_normal(&design.normal_equations())
}

pub fn lars_positive_path_normal(eq: &NormalEquations) -> Result<LarsPath> {
    let d = eq.d;
    if d == 0 {
        return Err(Error::InvalidParameter("design has no predictors".into()));
    }
    if let Some(k) = (0..d).find(|&k| !(eq.g(k, k) > 0.0)) {
        return Err(Error::DegeneratePredictor(k));
    }
    let mut beta = vec![0.0; d];
    let corr = eq.correlations(&beta);
    let (first, lambda_max) = argmax_lowest(&corr, |_| true);
    let mut knots = vec![lambda_max.max(0.0)];
    let mut betas = vec![beta.clone()];
    if lambda_max <= 0.0 {
        return Ok(LarsPath { knots, betas });
    }

    let mut lambda = lambda_max;
    let mut active = vec![first];
    let mut just_dropped: Option<usize> = None;
    let budget = 20 * d + 100;
    for _ in 0..budget {
        let corr = eq.correlations(&beta);
        let ones = vec![1.0; active.len()];
        let Some(w) = solve_spd(&submatrix(eq, &active), &ones) else {
            return Err(Error::InternalConsistency("active predictors are collinear".into()));
        };
        // a_j = G_{j,A} w: rate at which correlation j falls per unit step.
        let a: Vec<f64> = (0..d)
            .map(|j| active.iter().zip(&w).map(|(&i, wi)| eq.g(j, i) * wi).sum())
            .collect();

        let mut step = lambda;
        let mut event: Option<(bool, usize)> = None;
        for j in 0..d {
            if active.contains(&j) || Some(j) == just_dropped {
                continue;
            }
            let denom = 1.0 - a[j];
            if denom <= DENOM_EPS {
                continue;
            }
            let g = ((lambda - corr[j]) / denom).max(0.0);
            if g < step * (1.0 - 1e-12) || (event.is_none() && g < step) {
                step = g;
                event = Some((true, j));
            }
        }
        for (pos, &i) in active.iter().enumerate() {
            if w[pos] < 0.0 {
                let g = -beta[i] / w[pos];
                if g < step {
                    step = g;
                    event = Some((false, i));
                }
            }
        }

        for (pos, &i) in active.iter().enumerate() {
            beta[i] = (beta[i] + step * w[pos]).max(0.0);
        }
        lambda = (lambda - step).max(0.0);
        match event {
            None => {
                knots.push(0.0);
                betas.push(beta);
                return Ok(LarsPath { knots, betas });
            }
            Some((true, j)) => {
                active.push(j);
                active.sort_unstable();
                just_dropped = None;
            }
            Some((false, i)) => {
                beta[i] = 0.0;
                active.retain(|&k| k != i);
                just_dropped = Some(i);
            }
        }
        knots.push(lambda);
        betas.push(beta.clone());
        if active.is_empty() {
            // Only possible through a drop back to the origin; restart entry.
            let corr = eq.correlations(&beta);
            let (j, c) = argmax_lowest(&corr, |k| Some(k) != just_dropped);
            if c <= 0.0 {
                return Ok(LarsPath { knots, betas });
            }
            active.push(j);
        }
    }
    Err(Error::NonConvergence {
        routine: "positive lars",
        iterations: budget,
    })
}

fn argmax_lowest(v: &[f64], keep: impl Fn(usize) -> bool) -> (usize, f64) {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (k, &x) in v.iter().enumerate() {
        if keep(k) && x > best.1 {
            best = (k, x);
        }
    }
    best
}
