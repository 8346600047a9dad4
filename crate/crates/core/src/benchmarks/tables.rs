//! Drivers for the four reference tables: dependence shares on additive
//! models, HSIC and delta on the interaction model, and the two screening
//! studies on the Morris-type function.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::experiment::{run_experiment, ExperimentConfig, ExperimentMethod, MetricsReport};
use super::functions::{additive_model, analytic_sobol_additive, analytic_sobol_interaction, interaction_model};
use super::sampling::{sample_columns, to_columns, InputDistribution};
use crate::data::DataColumn;
use crate::error::{Error, Result};
use crate::gram::{center_unchecked, distance_gram, empirical_bandwidth, gaussian_gram};
use crate::indep_tests::{QuantileRule, TestMethod, TestParams, MIN_RESAMPLES};
use crate::local_regression::CvMode;
use crate::measures::{
    borgonovo_delta, dcor2_from_centered, dcov2_from_grams, default_sup_grid, hsic_from_grams, shares_of, sup_hsic,
    Measure, DEFAULT_BORGONOVO_BINS, DEFAULT_BORGONOVO_CLASSES,
};

const SHARE_TAG: u64 = 0x5A4D_0003;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    #[default]
    Full,
    /// Reduced repetition counts for quick checks.
    Quick,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShareModel {
    /// `sum_i alpha_i h_i(X_i)`; only inputs with `alpha_i != 0` are reported.
    Additive([f64; 3]),
    /// `h_2(X_1) + alpha h_2(X_1) h_2(X_2)`.
    Interaction(f64),
}

impl ShareModel {
    /// Indices (0-based) of the reported inputs.
    pub fn inputs(&self) -> Vec<usize> {
        match self {
            ShareModel::Additive(a) => (0..3).filter(|&i| a[i] != 0.0).collect(),
            ShareModel::Interaction(_) => vec![0, 1],
        }
    }

    pub fn label(&self) -> String {
        match self {
            ShareModel::Additive(a) => {
                let terms: Vec<String> = (0..3)
                    .filter(|&i| a[i] != 0.0)
                    .map(|i| format!("h{0}(X{0})", i + 1))
                    .collect();
                terms.join("+")
            }
            ShareModel::Interaction(alpha) => format!("h2(X1)+{alpha}*h2(X1)*h2(X2)"),
        }
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        match self {
            ShareModel::Additive(a) => additive_model(*a, [x[0], x[1], x[2]]),
            ShareModel::Interaction(alpha) => interaction_model(*alpha, [x[0], x[1]]),
        }
    }

    fn arity(&self) -> usize {
        match self {
            ShareModel::Additive(_) => 3,
            ShareModel::Interaction(_) => 2,
        }
    }

    /// Total variance-based indices of the reported inputs.
    pub fn sobol_total(&self) -> Result<Vec<f64>> {
        match self {
            ShareModel::Additive(a) => {
                let s = analytic_sobol_additive(*a)?;
                Ok(self.inputs().iter().map(|&i| s[i]).collect())
            }
            ShareModel::Interaction(alpha) => {
                let s = analytic_sobol_interaction(*alpha)?;
                Ok(vec![s.s1_total, s.s2_total])
            }
        }
    }
}

/// Mean estimates and mean normalized shares (percent) of each measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareTable {
    pub model: String,
    pub inputs: Vec<usize>,
    pub measures: Vec<Measure>,
    /// `values[m][i]`: mean estimate of measure `m` for input `i`.
    pub values: Vec<Vec<f64>>,
    /// `shares[m][i]`: mean of the per-repetition normalized shares.
    pub shares: Vec<Vec<f64>>,
    pub sobol_total: Vec<f64>,
    pub n: usize,
    pub repetitions: usize,
}

/// Estimates of every measure for every reported input in one sample.
fn estimate_all(xs: &[DataColumn], y: &DataColumn, measures: &[Measure]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(measures.len());
    for &m in measures {
        let row = match m {
            Measure::Hsic => {
                let ky = gaussian_gram(y, &empirical_bandwidth(y)?)?;
                xs.iter()
                    .map(|x| hsic_from_grams(&center_unchecked(&gaussian_gram(x, &empirical_bandwidth(x)?)?), &ky))
                    .collect::<Result<Vec<_>>>()?
            }
            Measure::Dcov2 => {
                let gy = distance_gram(y);
                xs.iter()
                    .map(|x| dcov2_from_grams(&center_unchecked(&distance_gram(x)), &gy))
                    .collect::<Result<Vec<_>>>()?
            }
            Measure::Dcor2 => {
                let b = center_unchecked(&distance_gram(y));
                xs.iter()
                    .map(|x| dcor2_from_centered(&center_unchecked(&distance_gram(x)), &b))
                    .collect::<Result<Vec<_>>>()?
            }
            Measure::SupHsic => xs
                .iter()
                .map(|x| Ok(sup_hsic(x, y, &default_sup_grid(x, y)?)?.estimate.value))
                .collect::<Result<Vec<_>>>()?,
            Measure::BorgonovoDelta => xs
                .iter()
                .map(|x| Ok(borgonovo_delta(x, y, DEFAULT_BORGONOVO_CLASSES, DEFAULT_BORGONOVO_BINS)?.value))
                .collect::<Result<Vec<_>>>()?,
            Measure::Pearson | Measure::Spearman => return Err(Error::UnsupportedMeasure(m.name())),
        };
        out.push(row);
    }
    Ok(out)
}

/// Mean estimates and shares over `repetitions` samples of size `n` drawn
/// from `U[-sqrt 3, sqrt 3]`.
pub fn sensitivity_table(
    model: ShareModel,
    n: usize,
    repetitions: usize,
    measures: &[Measure],
    seed: u64,
) -> Result<ShareTable> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("at least one repetition is required".into()));
    }
    let inputs = model.inputs();
    let per_rep: Vec<Vec<Vec<f64>>> = (0..repetitions)
        .into_par_iter()
        .map(|r| {
            let raw = sample_columns(
                n,
                model.arity(),
                InputDistribution::CenteredUniform,
                seed,
                &[SHARE_TAG, r as u64],
            )?;
            let y: Vec<f64> = (0..n)
                .map(|i| model.evaluate(&raw.iter().map(|c| c[i]).collect::<Vec<_>>()))
                .collect();
            let columns = to_columns(&raw)?;
            let xs: Vec<DataColumn> = inputs.iter().map(|&i| columns[i].clone()).collect();
            estimate_all(&xs, &DataColumn::from_scalars(&y)?, measures)
        })
        .collect::<Result<_>>()?;

    let reps = repetitions as f64;
    let mut values = vec![vec![0.0; inputs.len()]; measures.len()];
    let mut shares = vec![vec![0.0; inputs.len()]; measures.len()];
    for rep in &per_rep {
        for (m, row) in rep.iter().enumerate() {
            let s = shares_of(row)?;
            for i in 0..inputs.len() {
                values[m][i] += row[i] / reps;
                shares[m][i] += s[i] / reps;
            }
        }
    }
    Ok(ShareTable {
        model: model.label(),
        inputs,
        measures: measures.to_vec(),
        values,
        shares,
        sobol_total: model.sobol_total()?,
        n,
        repetitions,
    })
}

pub const TABLE1_MODELS: [[f64; 3]; 4] = [[1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]];
pub const TABLE1_MEASURES: [Measure; 3] = [Measure::Hsic, Measure::SupHsic, Measure::Dcor2];
pub const TABLE2_ALPHAS: [f64; 10] = [0.0, 1.0, 2.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const TABLE3_SIZES: [usize; 5] = [10, 25, 50, 100, 200];
pub const TABLE3_RATIOS: [usize; 3] = [2, 5, 10];
pub const TABLE3_METHODS: [TestMethod; 6] = [
    TestMethod::HsicGamma,
    TestMethod::DcovQuantile,
    TestMethod::HsicSpectral,
    TestMethod::DcovSpectral,
    TestMethod::HsicBootstrap,
    TestMethod::DcovBootstrap,
];
pub const TABLE4_SIZES: [usize; 3] = [50, 100, 200];
pub const SCREENING_INFLUENTIAL: usize = 5;

/// Repetition count of a table at the given scale.
pub fn repetitions(table: u8, scale: Scale) -> usize {
    match (table, scale) {
        (1, Scale::Full) => 100,
        (1, Scale::Quick) => 20,
        (2, Scale::Full) => 1000,
        (2, Scale::Quick) => 50,
        (_, Scale::Full) => 1000,
        (_, Scale::Quick) => 200,
    }
}

pub fn table1(n: usize, repetitions: usize, measures: &[Measure], seed: u64) -> Result<Vec<ShareTable>> {
    TABLE1_MODELS
        .iter()
        .map(|&a| sensitivity_table(ShareModel::Additive(a), n, repetitions, measures, seed))
        .collect()
}

pub fn table2(alphas: &[f64], n: usize, repetitions: usize, seed: u64) -> Result<Vec<ShareTable>> {
    alphas
        .iter()
        .map(|&a| {
            sensitivity_table(
                ShareModel::Interaction(a),
                n,
                repetitions,
                &[Measure::Hsic, Measure::BorgonovoDelta],
                seed,
            )
        })
        .collect()
}

/// Test parameters of the independence-test study: the quantile rule of the
/// distance-covariance test is one-sided.
pub fn table3_params(draws: usize, resamples: usize) -> TestParams {
    TestParams {
        draws,
        resamples: resamples.max(MIN_RESAMPLES),
        quantile_rule: QuantileRule::OneSided,
        ..TestParams::default()
    }
}

/// One `(n, r)` cell of the independence-test study with `d = 5` influential
/// inputs and `5 r` non-influential ones.
pub fn table3_cell(
    n: usize,
    ratio: usize,
    methods: &[TestMethod],
    repetitions: usize,
    params: TestParams,
    alpha: f64,
    seed: u64,
) -> Result<Vec<MetricsReport>> {
    let mut config = ExperimentConfig::new(
        n,
        SCREENING_INFLUENTIAL,
        SCREENING_INFLUENTIAL * ratio,
        repetitions,
        seed,
        methods.iter().map(|&m| ExperimentMethod::Test(m)).collect(),
    );
    config.params = params;
    config.alpha = alpha;
    run_experiment(&config)
}

pub fn table3(
    sizes: &[usize],
    ratios: &[usize],
    methods: &[TestMethod],
    repetitions: usize,
    params: TestParams,
    alpha: f64,
    seed: u64,
) -> Result<Vec<MetricsReport>> {
    let mut out = Vec::new();
    for &n in sizes {
        for &r in ratios {
            out.extend(table3_cell(n, r, methods, repetitions, params, alpha, seed)?);
        }
    }
    Ok(out)
}

pub const TABLE4_METHODS: [ExperimentMethod; 3] = [
    ExperimentMethod::Test(TestMethod::CoefficientBootstrap),
    ExperimentMethod::Lasso(CvMode::Standard),
    ExperimentMethod::Lasso(CvMode::Modified),
];

/// Local-regression study with `d = 5` influential and 5 non-influential
/// inputs.
pub fn table4(
    sizes: &[usize],
    methods: &[ExperimentMethod],
    repetitions: usize,
    resamples: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<MetricsReport>> {
    let mut out = Vec::new();
    for &n in sizes {
        let mut config = ExperimentConfig::new(
            n,
            SCREENING_INFLUENTIAL,
            SCREENING_INFLUENTIAL,
            repetitions,
            seed,
            methods.to_vec(),
        );
        config.params.resamples = resamples;
        config.alpha = alpha;
        out.extend(run_experiment(&config)?);
    }
    Ok(out)
}
