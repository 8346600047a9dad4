//! Point estimators of input/output dependence.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::data::DataColumn;
use crate::error::{Error, Result};
use crate::gram::{center_unchecked, distance_gram, empirical_bandwidth, gaussian_gram, BandwidthVector, GramMatrix};
use crate::indep_tests::{check_alpha, TestMethod, TestOutcome};

/// Values in `(-NEGATIVE_TOL, 0)` are rounding noise and are reported as 0.
pub const NEGATIVE_TOL: f64 = 1e-10;

pub const DEFAULT_BORGONOVO_CLASSES: usize = 20;
pub const DEFAULT_BORGONOVO_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Pearson,
    Spearman,
    Dcov2,
    Dcor2,
    Hsic,
    SupHsic,
    BorgonovoDelta,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Pearson,
        Measure::Spearman,
        Measure::Dcov2,
        Measure::Dcor2,
        Measure::Hsic,
        Measure::SupHsic,
        Measure::BorgonovoDelta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Pearson => "pearson",
            Measure::Spearman => "spearman",
            Measure::Dcov2 => "dcov2",
            Measure::Dcor2 => "dcor2",
            Measure::Hsic => "hsic",
            Measure::SupHsic => "sup-hsic",
            Measure::BorgonovoDelta => "borgonovo-delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceEstimate {
    pub measure: Measure,
    pub value: f64,
    pub input_index: usize,
}

impl DependenceEstimate {
    fn new(measure: Measure, value: f64) -> Self {
        Self {
            measure,
            value,
            input_index: 0,
        }
    }

    pub fn with_index(mut self, k: usize) -> Self {
        self.input_index = k;
        self
    }
}

/// A sup-HSIC value together with the grid point that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct SupHsic {
    pub estimate: DependenceEstimate,
    pub argmax: usize,
    pub bw_x: BandwidthVector,
    pub bw_y: BandwidthVector,
}

fn scalar<'a>(col: &'a DataColumn, name: &'static str) -> Result<&'a [f64]> {
    col.as_scalar().ok_or(Error::UnsupportedMeasure(name))
}

fn same_length(x: &DataColumn, y: &DataColumn) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Maps rounding noise below zero to 0; anything more negative is a bug.
pub(crate) fn clamp_nonnegative(value: f64, scale: f64, what: &str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -NEGATIVE_TOL * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::InternalConsistency(format!("{what} is negative: {value}")))
    }
}

fn correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateColumn { coordinate: 0 });
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1; tied values share the mean of their ranks.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

pub fn pearson(x: &DataColumn, y: &DataColumn) -> Result<DependenceEstimate> {
    same_length(x, y)?;
    let r = correlation(scalar(x, "pearson")?, scalar(y, "pearson")?)?;
    Ok(DependenceEstimate::new(Measure::Pearson, r))
}

pub fn spearman(x: &DataColumn, y: &DataColumn) -> Result<DependenceEstimate> {
    same_length(x, y)?;
    let rx = average_ranks(scalar(x, "spearman")?);
    let ry = average_ranks(scalar(y, "spearman")?);
    Ok(DependenceEstimate::new(Measure::Spearman, correlation(&rx, &ry)?))
}

/// Two-sided Student test of a zero correlation.
pub fn correlation_t_test(r: f64, n: usize, alpha: f64, method: TestMethod) -> Result<TestOutcome> {
    check_alpha(alpha)?;
    if n < 3 {
        return Err(Error::InsufficientSample { needed: 3, found: n });
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter(format!("correlation {r} outside [-1, 1]")));
    }
    let df = (n - 2) as f64;
    let (statistic, p_value) = if r.abs() == 1.0 {
        (r * f64::INFINITY, 0.0)
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        (t, (2.0 * dist.sf(t.abs())).min(1.0))
    };
    Ok(TestOutcome::from_p_value(statistic, p_value, alpha, method))
}

/// `(1/n^2) sum_ij a_ij g_ij` with `a` centered; `g` may be raw since the
/// centering of one factor is enough.
pub fn centered_product(a: &GramMatrix, g: &GramMatrix) -> f64 {
    debug_assert!(a.is_centered());
    let n = a.n() as f64;
    a.frobenius_dot(g) / (n * n)
}

/// `V^2_n` from the centered input and raw output distance Grams.
pub fn dcov2_from_grams(a: &GramMatrix, gy: &GramMatrix) -> Result<f64> {
    let v = centered_product(a, gy);
    let n2 = (a.n() * a.n()) as f64;
    let scale = (a.frobenius_dot(a) * gy.frobenius_dot(gy)).sqrt() / n2;
    clamp_nonnegative(v, scale, "distance covariance")
}

/// `HSIC_n` from the centered input and raw output kernel Grams.
pub fn hsic_from_grams(a: &GramMatrix, ky: &GramMatrix) -> Result<f64> {
    let v = centered_product(a, ky);
    let n2 = (a.n() * a.n()) as f64;
    let scale = (a.frobenius_dot(a) * ky.frobenius_dot(ky)).sqrt() / n2;
    clamp_nonnegative(v, scale, "HSIC")
}

pub fn dcov2(x: &DataColumn, y: &DataColumn) -> Result<DependenceEstimate> {
    same_length(x, y)?;
    let a = center_unchecked(&distance_gram(x));
    let v = dcov2_from_grams(&a, &distance_gram(y))?;
    Ok(DependenceEstimate::new(Measure::Dcov2, v))
}

/// `R^2_n` from both centered distance Grams.
pub fn dcor2_from_centered(a: &GramMatrix, b: &GramMatrix) -> Result<f64> {
    let vxy = dcov2_from_grams(a, b)?;
    let n2 = (a.n() * a.n()) as f64;
    let denom = (a.frobenius_dot(a) / n2 * (b.frobenius_dot(b) / n2)).sqrt();
    if denom > 0.0 {
        Ok((vxy / denom).clamp(0.0, 1.0))
    } else {
        Ok(0.0)
    }
}

pub fn dcor2(x: &DataColumn, y: &DataColumn) -> Result<DependenceEstimate> {
    same_length(x, y)?;
    let a = center_unchecked(&distance_gram(x));
    let b = center_unchecked(&distance_gram(y));
    Ok(DependenceEstimate::new(Measure::Dcor2, dcor2_from_centered(&a, &b)?))
}

pub fn hsic(
    x: &DataColumn,
    y: &DataColumn,
    bw_x: &BandwidthVector,
    bw_y: &BandwidthVector,
) -> Result<DependenceEstimate> {
    same_length(x, y)?;
    let a = center_unchecked(&gaussian_gram(x, bw_x)?);
    let v = hsic_from_grams(&a, &gaussian_gram(y, bw_y)?)?;
    Ok(DependenceEstimate::new(Measure::Hsic, v))
}

/// HSIC with both bandwidths set to the empirical variances.
pub fn hsic_empirical(x: &DataColumn, y: &DataColumn) -> Result<DependenceEstimate> {
    hsic(x, y, &empirical_bandwidth(x)?, &empirical_bandwidth(y)?)
}

/// The 5 x 5 grid `{s_x 4^i} x {s_y 4^j}`, `i, j in -2..=2`, around the
/// empirical bandwidths.
pub fn default_sup_grid(x: &DataColumn, y: &DataColumn) -> Result<Vec<(BandwidthVector, BandwidthVector)>> {
    let (bx, by) = (empirical_bandwidth(x)?, empirical_bandwidth(y)?);
    let factors = [1.0 / 16.0, 0.25, 1.0, 4.0, 16.0];
    let mut grid = Vec::with_capacity(25);
    for fx in factors {
        for fy in factors {
            grid.push((bx.scaled(fx)?, by.scaled(fy)?));
        }
    }
    Ok(grid)
}

/// Maximum HSIC over a bandwidth grid. Grams are built once per distinct
/// bandwidth on each side.
pub fn sup_hsic(x: &DataColumn, y: &DataColumn, grid: &[(BandwidthVector, BandwidthVector)]) -> Result<SupHsic> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    same_length(x, y)?;
    let mut xs: Vec<(&BandwidthVector, GramMatrix)> = Vec::new();
    let mut ys: Vec<(&BandwidthVector, GramMatrix)> = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for (g, (bx, by)) in grid.iter().enumerate() {
        let ix = match xs.iter().position(|(b, _)| *b == bx) {
            Some(i) => i,
            None => {
                xs.push((bx, center_unchecked(&gaussian_gram(x, bx)?)));
                xs.len() - 1
            }
        };
        let iy = match ys.iter().position(|(b, _)| *b == by) {
            Some(i) => i,
            None => {
                ys.push((by, gaussian_gram(y, by)?));
                ys.len() - 1
            }
        };
        let v = hsic_from_grams(&xs[ix].1, &ys[iy].1)?;
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((g, v));
        }
    }
    let (argmax, value) = best.expect("grid is non-empty");
    Ok(SupHsic {
        estimate: DependenceEstimate::new(Measure::SupHsic, value),
        argmax,
        bw_x: grid[argmax].0.clone(),
        bw_y: grid[argmax].1.clone(),
    })
}

/// Percentages `100 v_k / sum v`.
pub fn normalized_shares(estimates: &[DependenceEstimate]) -> Result<Vec<f64>> {
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    shares_of(&values)
}

pub fn shares_of(values: &[f64]) -> Result<Vec<f64>> {
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidParameter(format!("negative or undefined estimate {v}")));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroSum);
    }
    Ok(values.iter().map(|v| 100.0 * v / total).collect())
}

/// Histogram estimator of the moment-independent delta measure.
///
/// The sample is sorted by `x` and split into `n_classes` contiguous groups of
/// (nearly) equal size. Every group's `y` histogram is compared in L1 with the
/// pooled one on `n_bins` equal-width bins spanning the pooled range.
pub fn borgonovo_delta(x: &DataColumn, y: &DataColumn, n_classes: usize, n_bins: usize) -> Result<DependenceEstimate> {
    same_length(x, y)?;
    let xs = scalar(x, "borgonovo-delta")?;
    let ys = scalar(y, "borgonovo-delta")?;
    if n_classes == 0 || n_bins == 0 {
        return Err(Error::InvalidParameter("classes and bins must be positive".into()));
    }
    let n = xs.len();
    if n < 10 * n_classes {
        return Err(Error::InsufficientSample {
            needed: 10 * n_classes,
            found: n,
        });
    }
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / n_bins as f64;
    let bin = |v: f64| -> usize {
        if width > 0.0 {
            (((v - lo) / width) as usize).min(n_bins - 1)
        } else {
            0
        }
    };
    let bins: Vec<usize> = ys.iter().map(|&v| bin(v)).collect();
    let mut pooled = vec![0.0; n_bins];
    for &b in &bins {
        pooled[b] += 1.0 / n as f64;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let (base, extra) = (n / n_classes, n % n_classes);
    let mut start = 0;
    let mut total = 0.0;
    let mut hist = vec![0.0; n_bins];
    for c in 0..n_classes {
        let size = base + usize::from(c < extra);
        hist.iter_mut().for_each(|h| *h = 0.0);
        for &i in &order[start..start + size] {
            hist[bins[i]] += 1.0 / size as f64;
        }
        total += hist.iter().zip(&pooled).map(|(a, b)| (a - b).abs()).sum::<f64>();
        start += size;
    }
    Ok(DependenceEstimate::new(
        Measure::BorgonovoDelta,
        0.5 * total / n_classes as f64,
    ))
}

/// Every measure of `Measure::ALL` that applies to the column shapes, with
/// default settings.
pub fn all_estimates(x: &DataColumn, y: &DataColumn) -> Result<Vec<DependenceEstimate>> {
    let scalar_pair = x.dim() == 1 && y.dim() == 1;
    let mut out = Vec::with_capacity(Measure::ALL.len());
    if scalar_pair {
        out.push(pearson(x, y)?);
        out.push(spearman(x, y)?);
    }
    out.push(dcov2(x, y)?);
    out.push(dcor2(x, y)?);
    out.push(hsic_empirical(x, y)?);
    out.push(sup_hsic(x, y, &default_sup_grid(x, y)?)?.estimate);
    if scalar_pair && x.len() >= 10 * DEFAULT_BORGONOVO_CLASSES {
        out.push(borgonovo_delta(
            x,
            y,
            DEFAULT_BORGONOVO_CLASSES,
            DEFAULT_BORGONOVO_BINS,
        )?);
    }
    Ok(out)
}
