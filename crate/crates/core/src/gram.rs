//! Pairwise kernel and distance matrices.
//!
//! Every dependence measure in the crate reduces to Frobenius inner products
//! between Gram matrices, at least one of them double-centered. This module
//! builds those matrices, centers them, and extracts their spectra.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::data::DataColumn;
use crate::error::{Error, Result};

/// Relative threshold below which eigenvalues are treated as exact zeros.
pub const EIGEN_CLAMP_REL: f64 = 1e-10;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramKind {
    EuclideanDistance,
    GaussianKernel,
}

/// Squared correlation lengths of a Gaussian kernel, one per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthVector(Vec<f64>);

impl BandwidthVector {
    pub fn new(sigma2: Vec<f64>) -> Result<Self> {
        if sigma2.is_empty() {
            return Err(Error::InvalidParameter("empty bandwidth vector".into()));
        }
        if let Some(bad) = sigma2.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bad}"
            )));
        }
        Ok(Self(sigma2))
    }

    pub fn scalar(sigma2: f64) -> Result<Self> {
        Self::new(vec![sigma2])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|s| s * factor).collect())
    }
}

/// Dense symmetric `n x n` matrix of pairwise evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
    kind: GramKind,
    centered: bool,
}

impl GramMatrix {
    /// Wraps caller-provided entries after checking shape and symmetry.
    pub fn from_entries(n: usize, entries: Vec<f64>, kind: GramKind, centered: bool) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if (a - b).abs() > SYMMETRY_TOL * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            entries,
            kind,
            centered,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn kind(&self) -> GramKind {
        self.kind
    }

    #[inline]
    pub fn is_centered(&self) -> bool {
        self.centered
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Mean over the `n(n-1)` off-diagonal entries.
    pub fn off_diagonal_mean(&self) -> f64 {
        let n = self.n as f64;
        (self.sum() - self.trace()) / (n * (n - 1.0))
    }

    /// `sum_ij self_ij * other_ij`.
    pub fn frobenius_dot(&self, other: &GramMatrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum()
    }

    /// `sum_ij self_ij * other[idx_i, idx_j]`, i.e. the Frobenius product with
    /// `other` after its rows and columns are redrawn by `idx`.
    pub fn resampled_dot(&self, other: &GramMatrix, idx: &[usize]) -> f64 {
        debug_assert_eq!(self.n, idx.len());
        let mut total = 0.0;
        for (i, &pi) in idx.iter().enumerate() {
            let src = other.row(pi);
            let row = self.row(i);
            total += row.iter().zip(idx).map(|(a, &pj)| a * src[pj]).sum::<f64>();
        }
        total
    }

    /// The matrix `G[idx, idx]`. Only defined before centering.
    pub fn resample(&self, idx: &[usize]) -> Result<GramMatrix> {
        if self.centered {
            return Err(Error::AlreadyCentered);
        }
        let m = idx.len();
        let mut entries = Vec::with_capacity(m * m);
        for &pi in idx {
            let src = self.row(pi);
            entries.extend(idx.iter().map(|&pj| src[pj]));
        }
        Ok(GramMatrix {
            n: m,
            entries,
            kind: self.kind,
            centered: false,
        })
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }
}

/// Population (1/n) variance of each coordinate.
pub fn empirical_bandwidth(col: &DataColumn) -> Result<BandwidthVector> {
    let n = col.len() as f64;
    let mut sigma2 = Vec::with_capacity(col.dim());
    for j in 0..col.dim() {
        let first = col.row(0)[j];
        if col.coordinate(j).all(|v| v == first) {
            return Err(Error::DegenerateColumn { coordinate: j });
        }
        let mean = col.coordinate(j).sum::<f64>() / n;
        let var = col.coordinate(j).map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        if var <= 0.0 {
            return Err(Error::DegenerateColumn { coordinate: j });
        }
        sigma2.push(var);
    }
    BandwidthVector::new(sigma2)
}

fn fill_symmetric(n: usize, kind: GramKind, diag: f64, f: impl Fn(usize, usize) -> f64) -> GramMatrix {
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        entries[i * n + i] = diag;
        for j in (i + 1)..n {
            let v = f(i, j);
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    GramMatrix {
        n,
        entries,
        kind,
        centered: false,
    }
}

/// `K_ij = exp(-sum_k (z_ki - z_kj)^2 / sigma2_k)`.
pub fn gaussian_gram(col: &DataColumn, bw: &BandwidthVector) -> Result<GramMatrix> {
    if bw.dim() != col.dim() {
        return Err(Error::DimensionMismatch {
            expected: col.dim(),
            found: bw.dim(),
        });
    }
    let n = col.len();
    if let Some(z) = col.as_scalar() {
        let inv = 1.0 / bw.as_slice()[0];
        return Ok(fill_symmetric(n, GramKind::GaussianKernel, 1.0, |i, j| {
            let d = z[i] - z[j];
            (-d * d * inv).exp()
        }));
    }
    let inv: Vec<f64> = bw.as_slice().iter().map(|s| 1.0 / s).collect();
    Ok(fill_symmetric(n, GramKind::GaussianKernel, 1.0, |i, j| {
        let q: f64 = col
            .row(i)
            .iter()
            .zip(col.row(j))
            .zip(&inv)
            .map(|((a, b), w)| (a - b) * (a - b) * w)
            .sum();
        (-q).exp()
    }))
}

/// `G_ij = ||z_i - z_j||_2`.
pub fn distance_gram(col: &DataColumn) -> GramMatrix {
    let n = col.len();
    if let Some(z) = col.as_scalar() {
        return fill_symmetric(n, GramKind::EuclideanDistance, 0.0, |i, j| (z[i] - z[j]).abs());
    }
    fill_symmetric(n, GramKind::EuclideanDistance, 0.0, |i, j| {
        col.row(i)
            .iter()
            .zip(col.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}

/// `HGH` via the row-mean / column-mean / grand-mean update.
pub fn double_center(g: &GramMatrix) -> Result<GramMatrix> {
    if g.centered {
        return Err(Error::AlreadyCentered);
    }
    Ok(center_unchecked(g))
}

pub(crate) fn center_unchecked(g: &GramMatrix) -> GramMatrix {
    let n = g.n;
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| g.row(i).iter().sum::<f64>() / nf).collect();
    let mut col_means = vec![0.0; n];
    for i in 0..n {
        for (c, v) in col_means.iter_mut().zip(g.row(i)) {
            *c += v;
        }
    }
    col_means.iter_mut().for_each(|c| *c /= nf);
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut entries = Vec::with_capacity(n * n);
    for (i, rm) in row_means.iter().enumerate() {
        entries.extend(g.row(i).iter().zip(&col_means).map(|(v, cm)| v - rm - cm + grand));
    }
    GramMatrix {
        n,
        entries,
        kind: g.kind,
        centered: true,
    }
}

fn eigen_budget(n: usize) -> usize {
    100 * n.max(10)
}

fn decompose(g: &GramMatrix) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(g.to_dmatrix(), f64::EPSILON, eigen_budget(g.n)).ok_or(Error::NonConvergence {
        routine: "symmetric eigensolver",
        iterations: eigen_budget(g.n),
    })
}

/// All eigenvalues of a symmetric Gram matrix, sorted in descending order.
pub fn sym_eigenvalues(g: &GramMatrix) -> Result<Vec<f64>> {
    let mut values: Vec<f64> = decompose(g)?.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Eigenpairs sorted by descending eigenvalue; `vectors[k]` pairs with `values[k]`.
pub fn sym_eigen(g: &GramMatrix) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let eig = decompose(g)?;
    let mut order: Vec<usize> = (0..g.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
        .collect();
    Ok((values, vectors))
}

/// Sets eigenvalues with `|lambda| < rel * max|lambda|` to exactly zero.
pub fn clamp_spectrum(values: &mut [f64], rel: f64) {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cut = rel * scale;
    for v in values.iter_mut() {
        if v.abs() < cut {
            *v = 0.0;
        }
    }
}
