//! Linear model between local dependence matrices:
//! `D(Y)_ij ~ sum_k beta_k D(X_k)_ij`, `beta >= 0`.
//!
//! Matrices are symmetric, so only the upper triangle (diagonal included) is
//! stored, with off-diagonal entries scaled by `sqrt(2)`; vector inner
//! products then equal Frobenius products of the full matrices.

mod cv;
mod lars;
mod nnls;

pub use coef_test::{bootstrap_coefficient_test, coefficient_screen, CoefficientBootstrap};
pub use cv::{cv_curve, cv_select, hsic_lasso_screen, CvConfig, CvCurve, CvMode, CvSelection};
pub use lars::{lars_positive_path, lars_positive_path_normal, LarsPath};
pub use nnls::{nnls_fit, nnls_normal};

use serde::{Deserialize, Serialize};

use crate::data::{DataColumn, Dataset};
use crate::error::{Error, Result};
use crate::gram::{center_unchecked, distance_gram, empirical_bandwidth, gaussian_gram, BandwidthVector};
use crate::measures;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalMeasure {
    /// `HK H` with a Gaussian kernel.
    Hsic,
    /// `HGH` with Euclidean distances.
    Dcov,
    /// Symmetric rank-one matrix whose Frobenius products give sample covariances.
    Covariance,
}

/// Kernel bandwidths for every input and the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Bandwidths {
    pub inputs: Vec<BandwidthVector>,
    pub output: BandwidthVector,
}

impl Bandwidths {
    pub fn empirical(dataset: &Dataset) -> Result<Self> {
        Ok(Self {
            inputs: dataset
                .inputs()
                .iter()
                .map(empirical_bandwidth)
                .collect::<Result<_>>()?,
            output: empirical_bandwidth(dataset.output())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDesign {
    pub response: Vec<f64>,
    pub predictors: Vec<Vec<f64>>,
    pub measure: LocalMeasure,
    pub n: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub beta: Vec<f64>,
    /// `||D(Y) - sum_k beta_k D(X_k)||_F^2`.
    pub residual_norm2: f64,
    pub active: Vec<usize>,
}

/// `P^T P`, `P^T r` and `r^T r` of a design, row-major `d x d` Gram.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalEquations {
    pub g: Vec<f64>,
    pub c: Vec<f64>,
    pub rr: f64,
    pub d: usize,
}

impl NormalEquations {
    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.d + j]
    }

    /// `r^T r - 2 beta^T c + beta^T G beta`, floored at 0.
    pub fn objective(&self, beta: &[f64]) -> f64 {
        let d = self.d;
        let mut quad = 0.0;
        for i in 0..d {
            if beta[i] == 0.0 {
                continue;
            }
            let gb: f64 = (0..d).map(|j| self.g[i * d + j] * beta[j]).sum();
            quad += beta[i] * gb;
        }
        let lin: f64 = beta.iter().zip(&self.c).map(|(b, c)| b * c).sum();
        (self.rr - 2.0 * lin + quad).max(0.0)
    }

    /// `c - G beta`, minus half the gradient of the objective.
    pub fn correlations(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.d)
            .map(|i| self.c[i] - (0..self.d).map(|j| self.g(i, j) * beta[j]).sum::<f64>())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            g: self.g.iter().map(|v| v * factor).collect(),
            c: self.c.iter().map(|v| v * factor).collect(),
            rr: self.rr * factor,
            d: self.d,
        }
    }

    pub(crate) fn fit_result(&self, beta: Vec<f64>) -> FitResult {
        let active = beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b > 0.0)
            .map(|(k, _)| k)
            .collect();
        FitResult {
            residual_norm2: self.objective(&beta),
            beta,
            active,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Upper triangle including the diagonal, off-diagonals times `sqrt(2)`.
pub fn vectorize_upper(n: usize, entry: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let s = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        out.push(entry(i, i));
        for j in (i + 1)..n {
            out.push(s * entry(i, j));
        }
    }
    out
}

/// Centered sample values scaled so that `<M(u), M(v)>_F / n^2` is the
/// unbiased sample covariance, where `M(u)_ij = (u_i + u_j) / 2`.
fn covariance_scores(col: &DataColumn) -> Result<Vec<f64>> {
    let v = col.as_scalar().ok_or(Error::UnsupportedMeasure("covariance"))?;
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let s = (2.0 * n / (n - 1.0)).sqrt();
    Ok(v.iter().map(|x| s * (x - mean)).collect())
}

/// Vectorized local matrix `D(col)`.
pub fn local_vector(col: &DataColumn, measure: LocalMeasure, bw: Option<&BandwidthVector>) -> Result<Vec<f64>> {
    let n = col.len();
    match measure {
        LocalMeasure::Hsic => {
            let owned;
            let bw = match bw {
                Some(b) => b,
                None => {
                    owned = empirical_bandwidth(col)?;
                    &owned
                }
            };
            let a = center_unchecked(&gaussian_gram(col, bw)?);
            Ok(vectorize_upper(n, |i, j| a.get(i, j)))
        }
        LocalMeasure::Dcov => {
            let a = center_unchecked(&distance_gram(col));
            Ok(vectorize_upper(n, |i, j| a.get(i, j)))
        }
        LocalMeasure::Covariance => {
            let u = covariance_scores(col)?;
            Ok(vectorize_upper(n, |i, j| 0.5 * (u[i] + u[j])))
        }
    }
}

/// Design with empirical bandwidths.
pub fn build_design(dataset: &Dataset, measure: LocalMeasure) -> Result<LocalDesign> {
    let bw = match measure {
        LocalMeasure::Hsic => Some(Bandwidths::empirical(dataset)?),
        _ => None,
    };
    build_design_with(dataset, measure, bw.as_ref())
}

/// Design with caller-supplied bandwidths (ignored unless `measure` is HSIC).
pub fn build_design_with(dataset: &Dataset, measure: LocalMeasure, bw: Option<&Bandwidths>) -> Result<LocalDesign> {
    if let Some(b) = bw {
        if b.inputs.len() != dataset.d() {
            return Err(Error::DimensionMismatch {
                expected: dataset.d(),
                found: b.inputs.len(),
            });
        }
    }
    let response = local_vector(dataset.output(), measure, bw.map(|b| &b.output))?;
    let predictors = dataset
        .inputs()
        .iter()
        .enumerate()
        .map(|(k, col)| local_vector(col, measure, bw.map(|b| &b.inputs[k])))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalDesign {
        response,
        predictors,
        measure,
        n: dataset.n(),
        d: dataset.d(),
    })
}

impl LocalDesign {
    pub fn normal_equations(&self) -> NormalEquations {
        let d = self.d;
        let mut g = vec![0.0; d * d];
        for i in 0..d {
            for j in i..d {
                let v = dot(&self.predictors[i], &self.predictors[j]);
                g[i * d + j] = v;
                g[j * d + i] = v;
            }
        }
        NormalEquations {
            g,
            c: self.predictors.iter().map(|p| dot(p, &self.response)).collect(),
            rr: dot(&self.response, &self.response),
            d,
        }
    }

    /// `||response - sum_k beta_k predictor_k||^2` evaluated directly.
    pub fn frobenius_objective(&self, beta: &[f64]) -> f64 {
        let mut r = self.response.clone();
        for (b, p) in beta.iter().zip(&self.predictors) {
            if *b != 0.0 {
                r.iter_mut().zip(p).for_each(|(ri, pi)| *ri -= b * pi);
            }
        }
        dot(&r, &r)
    }
}

fn cross_measure(a: &DataColumn, b: &DataColumn, measure: LocalMeasure) -> Result<f64> {
    Ok(match measure {
        LocalMeasure::Hsic => measures::hsic_empirical(a, b)?.value,
        LocalMeasure::Dcov => measures::dcov2(a, b)?.value,
        LocalMeasure::Covariance => {
            let u = a.as_scalar().ok_or(Error::UnsupportedMeasure("covariance"))?;
            let v = b.as_scalar().ok_or(Error::UnsupportedMeasure("covariance"))?;
            let n = u.len() as f64;
            let (mu, mv) = (u.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
            u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum::<f64>() / (n - 1.0)
        }
    })
}

/// The objective written through pairwise dependence estimates:
/// `Delta(Y,Y) - 2 sum_k beta_k Delta(X_k,Y) + sum_kl beta_k beta_l Delta(X_k,X_l)`.
/// Equals the Frobenius objective divided by `n^2`.
pub fn objective_expand(beta: &[f64], dataset: &Dataset, measure: LocalMeasure) -> Result<f64> {
    if beta.len() != dataset.d() {
        return Err(Error::DimensionMismatch {
            expected: dataset.d(),
            found: beta.len(),
        });
    }
    let y = dataset.output();
    let mut total = cross_measure(y, y, measure)?;
    for k in 0..dataset.d() {
        if beta[k] == 0.0 {
            continue;
        }
        total -= 2.0 * beta[k] * cross_measure(dataset.input(k), y, measure)?;
        for l in 0..dataset.d() {
            if beta[l] != 0.0 {
                total += beta[k] * beta[l] * cross_measure(dataset.input(k), dataset.input(l), measure)?;
            }
        }
    }
    Ok(total)
}

/// Cholesky solve of a small SPD system; `None` when not numerically SPD.
pub(crate) fn solve_spd(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let scale = (0..m).map(|i| a[i * m + i].abs()).fold(0.0, f64::max);
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if s <= 1e-13 * scale {
                    return None;
                }
                l[i * m + i] = s.sqrt();
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    let mut z = b.to_vec();
    for i in 0..m {
        for k in 0..i {
            z[i] -= l[i * m + k] * z[k];
        }
        z[i] /= l[i * m + i];
    }
    for i in (0..m).rev() {
        for k in (i + 1)..m {
            z[i] -= l[k * m + i] * z[k];
        }
        z[i] /= l[i * m + i];
    }
    Some(z)
}

/// Sub-system of `G` restricted to `idx`.
pub(crate) fn submatrix(eq: &NormalEquations, idx: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(idx.len() * idx.len());
    for &i in idx {
        for &j in idx {
            out.push(eq.g(i, j));
        }
    }
    out
}
