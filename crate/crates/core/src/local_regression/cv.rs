//! Cross-validated choice of the lasso penalty.
//!
//! Folds split observations, so a held-out block only contains pairs whose
//! two indices are both held out. All inner products are divided by the
//! squared block size, which puts `lambda` and the fold errors on the scale
//! of the dependence estimators themselves and makes folds comparable.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{build_design_with, lars_positive_path_normal, Bandwidths, LocalMeasure};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::indep_tests::{InputDecision, ScreeningReport};
use crate::rng::{self, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CvMode {
    /// Minimize the mean fold error.
    Standard,
    /// Minimize mean minus `sigma_weight` times the fold standard deviation.
    #[default]
    Modified,
}

impl CvMode {
    pub fn name(self) -> &'static str {
        match self {
            CvMode::Standard => "standard",
            CvMode::Modified => "modified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub grid_len: usize,
    /// Smallest grid value relative to `lambda_max`.
    pub min_ratio: f64,
    pub sigma_weight: f64,
    pub measure: LocalMeasure,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            grid_len: 100,
            min_ratio: 1e-4,
            sigma_weight: 0.5,
            measure: LocalMeasure::Hsic,
        }
    }
}

/// Fold-error summary over a decreasing `lambda` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvCurve {
    pub lambdas: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// `errors[f][l]`: error of fold `f` at grid point `l`.
    pub errors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSelection {
    pub lambda_hat: f64,
    pub index: usize,
    pub mode: CvMode,
    pub curve: CvCurve,
}

impl CvCurve {
    /// Grid index minimizing the mode's criterion; ties go to the larger
    /// penalty.
    pub fn select(&self, mode: CvMode, sigma_weight: f64) -> usize {
        let score = |l: usize| match mode {
            CvMode::Standard => self.mean[l],
            CvMode::Modified => self.mean[l] - sigma_weight * self.std[l],
        };
        (0..self.lambdas.len()).fold(0, |best, l| if score(l) < score(best) { l } else { best })
    }
}

/// Fold membership: a random permutation cut into nearly equal blocks.
fn fold_blocks<R: Rng + ?Sized>(n: usize, folds: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    let (base, extra) = (n / folds, n % folds);
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let size = base + usize::from(f < extra);
        let mut block = idx[start..start + size].to_vec();
        block.sort_unstable();
        out.push(block);
        start += size;
    }
    out
}

fn log_grid(lambda_max: f64, len: usize, min_ratio: f64) -> Vec<f64> {
    if len == 1 {
        return vec![lambda_max];
    }
    let (hi, lo) = (lambda_max.ln(), (lambda_max * min_ratio).ln());
    (0..len)
        .map(|l| (hi + (lo - hi) * l as f64 / (len - 1) as f64).exp())
        .collect()
}

fn inverse_square(n: usize) -> f64 {
    1.0 / (n as f64 * n as f64)
}

pub fn cv_curve<R: Rng + ?Sized>(dataset: &Dataset, config: &CvConfig, rng: &mut R) -> Result<CvCurve> {
    let n = dataset.n();
    if config.folds < 2 {
        return Err(Error::InvalidParameter("at least two folds are required".into()));
    }
    if n < 2 * config.folds {
        return Err(Error::InsufficientSample {
            needed: 2 * config.folds,
            found: n,
        });
    }
    if config.grid_len == 0 {
        return Err(Error::EmptyGrid);
    }
    let full = build_design_with(dataset, config.measure, bandwidths(dataset, config.measure)?.as_ref())?
        .normal_equations()
        .scaled(inverse_square(n));
    let lambda_max = full.c.iter().copied().fold(0.0, f64::max);
    if lambda_max <= 0.0 {
        return Err(Error::ZeroModel);
    }
    let lambdas = log_grid(lambda_max, config.grid_len, config.min_ratio);

    let blocks = fold_blocks(n, config.folds, rng);
    let mut errors = Vec::with_capacity(config.folds);
    for (f, held) in blocks.iter().enumerate() {
        let train: Vec<usize> = blocks
            .iter()
            .enumerate()
            .filter(|(g, _)| *g != f)
            .flat_map(|(_, b)| b.iter().copied())
            .collect();
        let train_ds = dataset.select_rows(&train)?;
        let bw = bandwidths(&train_ds, config.measure)?;
        let train_eq = build_design_with(&train_ds, config.measure, bw.as_ref())?
            .normal_equations()
            .scaled(inverse_square(train.len()));
        let path = lars_positive_path_normal(&train_eq)?;
        let held_eq = build_design_with(&dataset.select_rows(held)?, config.measure, bw.as_ref())?
            .normal_equations()
            .scaled(inverse_square(held.len()));
        errors.push(
            lambdas
                .iter()
                .map(|&l| held_eq.objective(&path.coefficients_at(l)))
                .collect::<Vec<_>>(),
        );
    }

    let folds = errors.len() as f64;
    let mut mean = vec![0.0; lambdas.len()];
    let mut std = vec![0.0; lambdas.len()];
    for l in 0..lambdas.len() {
        let m = errors.iter().map(|e| e[l]).sum::<f64>() / folds;
        let v = errors.iter().map(|e| (e[l] - m).powi(2)).sum::<f64>() / (folds - 1.0);
        mean[l] = m;
        std[l] = v.sqrt();
    }
    Ok(CvCurve {
        lambdas,
        mean,
        std,
        errors,
    })
}

fn bandwidths(dataset: &Dataset, measure: LocalMeasure) -> Result<Option<Bandwidths>> {
    match measure {
        LocalMeasure::Hsic => Ok(Some(Bandwidths::empirical(dataset)?)),
        _ => Ok(None),
    }
}

pub fn cv_select<R: Rng + ?Sized>(
    dataset: &Dataset,
    config: &CvConfig,
    mode: CvMode,
    rng: &mut R,
) -> Result<CvSelection> {
    let curve = cv_curve(dataset, config, rng)?;
    let index = curve.select(mode, config.sigma_weight);
    Ok(CvSelection {
        lambda_hat: curve.lambdas[index],
        index,
        mode,
        curve,
    })
}

/// Lasso screening: the inputs with a positive coefficient at the
/// cross-validated penalty on the full sample.
pub fn hsic_lasso_screen(dataset: &Dataset, mode: CvMode, config: &CvConfig, seed: u64) -> Result<ScreeningReport> {
    let mut rng: StreamRng = rng::stream(seed, &[0x1A55_0000]);
    let selection = cv_select(dataset, config, mode, &mut rng)?;
    let n = dataset.n();
    let eq = build_design_with(dataset, config.measure, bandwidths(dataset, config.measure)?.as_ref())?
        .normal_equations()
        .scaled(inverse_square(n));
    let beta = lars_positive_path_normal(&eq)?.coefficients_at(selection.lambda_hat);
    let per_input = beta
        .iter()
        .enumerate()
        .map(|(index, &b)| InputDecision {
            index,
            statistic: b,
            p_value: None,
            reject: b > 0.0,
        })
        .collect();
    Ok(ScreeningReport::from_decisions(
        &format!("lasso-{}", mode.name()),
        None,
        n,
        per_input,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DataColumn;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn uniform_inputs(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<DataColumn> {
        (0..d)
            .map(|_| DataColumn::from_scalars(&(0..n).map(|_| rng.random::<f64>()).collect::<Vec<_>>()).unwrap())
            .collect()
    }

    #[test]
    fn grid_is_log_spaced() {
        let g = log_grid(2.0, 5, 1e-4);
        assert!((g[0] - 2.0).abs() < 1e-15);
        assert!((g[4] - 2e-4).abs() < 1e-15);
        assert!((g[1] / g[0] - g[2] / g[1]).abs() < 1e-12);
    }

    #[test]
    fn folds_partition_the_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let blocks = fold_blocks(23, 5, &mut rng);
        let mut all: Vec<usize> = blocks.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert!(blocks.iter().all(|b| b.len() == 4 || b.len() == 5));
    }

    #[test]
    fn requires_two_observations_per_fold() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let inputs = uniform_inputs(9, 2, &mut rng);
        let y = inputs[0].clone();
        let ds = Dataset::new(inputs, y).unwrap();
        assert!(matches!(
            cv_curve(&ds, &CvConfig::default(), &mut rng),
            Err(Error::InsufficientSample { needed: 10, found: 9 })
        ));
    }

    #[test]
    fn dominant_input_is_selected_by_both_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let inputs = uniform_inputs(150, 3, &mut rng);
        let y: Vec<f64> = inputs[1].values().iter().map(|v| (4.0 * v).sin()).collect();
        let ds = Dataset::new(inputs, DataColumn::from_scalars(&y).unwrap()).unwrap();
        for mode in [CvMode::Standard, CvMode::Modified] {
            let report = hsic_lasso_screen(&ds, mode, &CvConfig::default(), 3).unwrap();
            assert!(report.is_selected(1), "{mode:?}");
        }
    }

    #[test]
    fn modified_mode_with_zero_weight_is_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let inputs = uniform_inputs(60, 3, &mut rng);
        let y: Vec<f64> = inputs[0].values().iter().map(|v| v * v).collect();
        let ds = Dataset::new(inputs, DataColumn::from_scalars(&y).unwrap()).unwrap();
        let curve = cv_curve(&ds, &CvConfig::default(), &mut rng).unwrap();
        assert_eq!(curve.select(CvMode::Modified, 0.0), curve.select(CvMode::Standard, 0.5));
        assert_eq!(curve.errors.len(), 5);
        assert!(curve.lambdas.windows(2).all(|w| w[0] > w[1]));
    }
}
