use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use depscreen::benchmarks::ExperimentMethod;
use depscreen::indep_tests::{QuantileRule, ResampleMode, TestMethod};
use depscreen::local_regression::{CvMode, LocalMeasure};
use depscreen::measures::Measure;

#[derive(Debug, Parser)]
#[command(
    name = "depscreen",
    version,
    about = "Dependence measures and input screening for simulator data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for the parallel parts [default: all cores]
    #[arg(long, global = true, env = "DEPSCREEN_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Report path [default: standard output]
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Master seed; drawn from system entropy and printed when absent
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every dependence estimate between each input and the output
    Measure(InputArgs),
    /// One independence test per input
    Test(TestArgs),
    /// Screening report of one test: decisions and selected inputs
    Screen(TestArgs),
    /// HSIC-Lasso selection with a cross-validated penalty
    Lasso(LassoArgs),
    /// Bootstrap tests of the local-regression coefficients
    CoefTest(CoefArgs),
    /// Reproduce one of the reference tables
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with columns x1..xd and one or more y columns
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: InputArgs,

    /// hsic-gamma, dcov-quantile, {hsic,dcov}-{spectral,bootstrap},
    /// {pearson,spearman}-{t,bootstrap} or coefficient-bootstrap
    #[arg(long, value_parser = parse_test_method)]
    pub method: TestMethod,

    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,

    /// Null draws of the spectral tests
    #[arg(long, default_value_t = depscreen::indep_tests::DEFAULT_DRAWS)]
    pub draws: usize,

    /// Resamples of the bootstrap tests
    #[arg(long, default_value_t = depscreen::indep_tests::DEFAULT_RESAMPLES)]
    pub resamples: usize,

    #[arg(long, value_enum, default_value_t = ModeArg::Bootstrap)]
    pub resample_mode: ModeArg,

    /// Normal quantile of the distance-covariance threshold
    #[arg(long, value_enum, default_value_t = RuleArg::TwoSided)]
    pub quantile_rule: RuleArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Bootstrap,
    Permutation,
}

impl From<ModeArg> for ResampleMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Bootstrap => ResampleMode::Bootstrap,
            ModeArg::Permutation => ResampleMode::Permutation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    TwoSided,
    OneSided,
}

impl From<RuleArg> for QuantileRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::TwoSided => QuantileRule::TwoSided,
            RuleArg::OneSided => QuantileRule::OneSided,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CvModeArg {
    Standard,
    Modified,
}

impl From<CvModeArg> for CvMode {
    fn from(m: CvModeArg) -> Self {
        match m {
            CvModeArg::Standard => CvMode::Standard,
            CvModeArg::Modified => CvMode::Modified,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LocalMeasureArg {
    Hsic,
    Dcov,
    Covariance,
}

impl From<LocalMeasureArg> for LocalMeasure {
    fn from(m: LocalMeasureArg) -> Self {
        match m {
            LocalMeasureArg::Hsic => LocalMeasure::Hsic,
            LocalMeasureArg::Dcov => LocalMeasure::Dcov,
            LocalMeasureArg::Covariance => LocalMeasure::Covariance,
        }
    }
}

#[derive(Debug, Args)]
pub struct LassoArgs {
    #[command(flatten)]
    pub data: InputArgs,

    #[arg(long, value_enum, default_value_t = CvModeArg::Modified)]
    pub cv_mode: CvModeArg,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..))]
    pub folds: u32,

    /// Penalty grid size
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub grid: u32,

    /// Weight of the fold standard deviation in the modified rule
    #[arg(long, default_value_t = 0.5)]
    pub sigma_weight: f64,
}

#[derive(Debug, Args)]
pub struct CoefArgs {
    #[command(flatten)]
    pub data: InputArgs,

    #[arg(long, value_enum, default_value_t = LocalMeasureArg::Hsic)]
    pub measure: LocalMeasureArg,

    #[arg(long, default_value_t = depscreen::indep_tests::DEFAULT_RESAMPLES)]
    pub resamples: usize,

    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Table1,
    Table2,
    Table3,
    Table4,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub table: Table,

    /// Reduced repetition counts
    #[arg(long)]
    pub quick: bool,

    /// Override the repetition count
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub repetitions: Option<u32>,

    /// Sample sizes (screening tables)
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,

    /// Ratios of non-influential to influential inputs (table3)
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<usize>>,

    /// Screening methods (table3, table4)
    #[arg(long, value_delimiter = ',', value_parser = parse_experiment_method)]
    pub methods: Option<Vec<ExperimentMethod>>,

    /// Measures (table1)
    #[arg(long, value_delimiter = ',', value_parser = parse_measure)]
    pub measures: Option<Vec<Measure>>,

    /// Interaction weights (table2)
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,

    /// Sample size of the share tables (table1, table2)
    #[arg(long, default_value_t = 1000)]
    pub sample_size: usize,

    #[arg(long, default_value_t = depscreen::indep_tests::DEFAULT_DRAWS)]
    pub draws: usize,

    #[arg(long, default_value_t = depscreen::indep_tests::DEFAULT_RESAMPLES)]
    pub resamples: usize,

    /// Level of the screening tests
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    pub alpha: f64,
}

pub fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn parse_test_method(s: &str) -> Result<TestMethod, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = TestMethod::ALL.iter().map(|m| m.name()).collect();
        format!("unknown method `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_experiment_method(s: &str) -> Result<ExperimentMethod, String> {
    s.parse().map_err(|_| format!("unknown method `{s}`"))
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    Measure::ALL
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| format!("unknown measure `{s}`"))
}
