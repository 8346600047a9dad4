//! Monte-Carlo screening experiments: repeated sampling of a model with
//! influential and non-influential inputs, screened by one or more methods.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions::morris_model;
use super::sampling::{sample_columns, to_columns, InputDistribution};
use crate::data::{DataColumn, Dataset};
use crate::error::{Error, Result};
use crate::indep_tests::{screen, ScreeningReport, TestMethod, TestParams};
use crate::local_regression::{hsic_lasso_screen, CvConfig, CvMode};
use crate::rng;

const SAMPLE_TAG: u64 = 0x5A4D_0001;
const METHOD_TAG: u64 = 0x5A4D_0002;

/// Output model of a screening experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScreeningModel {
    /// Morris-type function on `U[0,1]` inputs with `k = d`.
    Morris,
    /// Sum of the influential inputs, on `U[0,1]` inputs.
    Linear,
}

impl ScreeningModel {
    fn evaluate(self, d: usize, d_check: usize, x: &[f64]) -> f64 {
        match self {
            ScreeningModel::Morris => morris_model(d, d_check, x),
            ScreeningModel::Linear => x[..d].iter().sum(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentMethod {
    Test(TestMethod),
    Lasso(CvMode),
}

impl ExperimentMethod {
    pub fn name(self) -> String {
        match self {
            ExperimentMethod::Test(m) => m.name().to_string(),
            ExperimentMethod::Lasso(mode) => format!("lasso-{}", mode.name()),
        }
    }
}

impl fmt::Display for ExperimentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ExperimentMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lasso-standard" => Ok(ExperimentMethod::Lasso(CvMode::Standard)),
            "lasso-modified" => Ok(ExperimentMethod::Lasso(CvMode::Modified)),
            _ => s.parse().map(ExperimentMethod::Test),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ScreeningModel,
    pub n: usize,
    /// Influential inputs.
    pub d: usize,
    /// Non-influential inputs.
    pub d_check: usize,
    pub repetitions: usize,
    pub alpha: f64,
    pub params: TestParams,
    pub cv: CvConfig,
    pub seed: u64,
    pub methods: Vec<ExperimentMethod>,
}

impl ExperimentConfig {
    pub fn new(
        n: usize,
        d: usize,
        d_check: usize,
        repetitions: usize,
        seed: u64,
        methods: Vec<ExperimentMethod>,
    ) -> Self {
        Self {
            model: ScreeningModel::Morris,
            n,
            d,
            d_check,
            repetitions,
            alpha: 0.05,
            params: TestParams::default(),
            cv: CvConfig::default(),
            seed,
            methods,
        }
    }

    /// `d_check / d`.
    pub fn ratio(&self) -> f64 {
        self.d_check as f64 / self.d as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 6 {
            return Err(Error::InsufficientSample {
                needed: 6,
                found: self.n,
            });
        }
        if self.d == 0 || self.repetitions == 0 || self.methods.is_empty() {
            return Err(Error::InvalidParameter(
                "an experiment needs an influential input, a repetition and a method".into(),
            ));
        }
        crate::indep_tests::check_alpha(self.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: String,
    pub n: usize,
    pub d: usize,
    pub d_check: usize,
    pub repetitions: usize,
    /// Percentage of non-influential inputs selected (type I error).
    pub non_influential_rate: f64,
    /// Percentage of influential inputs selected (power).
    pub influential_rate: f64,
    /// Percentage of repetitions selecting exactly the influential inputs.
    pub perfect_screening_rate: f64,
    /// Percentage of repetitions selecting each input.
    pub selection_rates: Vec<f64>,
}

/// One repetition's dataset.
pub fn experiment_dataset(config: &ExperimentConfig, repetition: usize) -> Result<Dataset> {
    let p = config.d + config.d_check;
    let raw = sample_columns(
        config.n,
        p,
        InputDistribution::UnitUniform,
        config.seed,
        &[SAMPLE_TAG, repetition as u64],
    )?;
    let mut row = vec![0.0; p];
    let y: Vec<f64> = (0..config.n)
        .map(|i| {
            for (r, col) in row.iter_mut().zip(&raw) {
                *r = col[i];
            }
            config.model.evaluate(config.d, config.d_check, &row)
        })
        .collect();
    Dataset::new(to_columns(&raw)?, DataColumn::from_scalars(&y)?)
}

fn run_method(config: &ExperimentConfig, method: ExperimentMethod, ds: &Dataset, seed: u64) -> Result<ScreeningReport> {
    match method {
        ExperimentMethod::Test(m) => screen(ds, m, &config.params, config.alpha, seed),
        ExperimentMethod::Lasso(mode) => hsic_lasso_screen(ds, mode, &config.cv, seed),
    }
}

/// Selections of every method in one repetition. All methods see the same
/// sample and the same method seed.
fn run_repetition(config: &ExperimentConfig, repetition: usize) -> Result<Vec<Vec<bool>>> {
    let ds = experiment_dataset(config, repetition)?;
    let seed = rng::derive_seed(config.seed, &[METHOD_TAG, repetition as u64]);
    config
        .methods
        .iter()
        .map(|&m| {
            let report = run_method(config, m, &ds, seed)?;
            Ok(report.per_input.iter().map(|d| d.reject).collect())
        })
        .collect()
}

/// One report per configured method, in configuration order. Repetitions run
/// in parallel; counts are accumulated in repetition order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsReport>> {
    config.validate()?;
    let per_rep: Vec<Vec<Vec<bool>>> = (0..config.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(config, r))
        .collect::<Result<_>>()?;

    let (d, p, reps) = (config.d, config.d + config.d_check, config.repetitions);
    Ok(config
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let mut counts = vec![0usize; p];
            let mut perfect = 0usize;
            for rep in &per_rep {
                let sel = &rep[mi];
                for (c, &s) in counts.iter_mut().zip(sel) {
                    *c += usize::from(s);
                }
                if sel[..d].iter().all(|&s| s) && !sel[d..].iter().any(|&s| s) {
                    perfect += 1;
                }
            }
            let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
            MetricsReport {
                method: method.name(),
                n: config.n,
                d,
                d_check: config.d_check,
                repetitions: reps,
                non_influential_rate: pct(counts[d..].iter().sum(), config.d_check * reps),
                influential_rate: pct(counts[..d].iter().sum(), d * reps),
                perfect_screening_rate: pct(perfect, reps),
                selection_rates: counts.iter().map(|&c| pct(c, reps)).collect(),
            }
        })
        .collect())
}
