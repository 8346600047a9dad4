use depscreen::benchmarks::{
    repetitions, table1, table2, table3, table3_params, table4, ExperimentMethod, MetricsReport, Scale, ShareTable,
    TABLE1_MEASURES, TABLE2_ALPHAS, TABLE3_METHODS, TABLE3_RATIOS, TABLE3_SIZES, TABLE4_METHODS, TABLE4_SIZES,
};
use depscreen::indep_tests::{screen, TestParams};
use depscreen::local_regression::{coefficient_screen, hsic_lasso_screen, CvConfig};
use depscreen::measures::all_estimates;
use serde::Serialize;

use crate::args::{BenchArgs, Cli, Command, Table, TestArgs};
use crate::io::{fmt_num, load_dataset, render, report_table, sig12, write_output, CliError, Report, Table as Out};

/// Seed from the command line, or a fresh one that is reported on stderr.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s: u64 = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

#[derive(Serialize)]
struct EstimateRow {
    index: usize,
    measure: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct Estimates {
    estimates: Vec<EstimateRow>,
}

#[derive(Serialize)]
struct TestReport<'a> {
    method: &'a str,
    alpha: Option<f64>,
    seed: u64,
    per_input: &'a [crate::io::ReportRow],
}

#[derive(Serialize)]
struct ShareRow {
    model: String,
    input: String,
    measure: &'static str,
    value: f64,
    share: f64,
    sobol_total: f64,
}

#[derive(Serialize)]
struct BenchOutput<R: Serialize> {
    table: &'static str,
    seed: u64,
    repetitions: usize,
    rows: Vec<R>,
}

fn test_params(args: &TestArgs) -> TestParams {
    TestParams {
        draws: args.draws,
        resamples: args.resamples,
        mode: args.resample_mode.into(),
        quantile_rule: args.quantile_rule.into(),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let content = match &cli.command {
        Command::Measure(a) => {
            let ds = load_dataset(&a.input)?;
            let mut rows = Vec::new();
            for k in 0..ds.d() {
                for e in all_estimates(ds.input(k), ds.output())? {
                    rows.push(EstimateRow {
                        index: k + 1,
                        measure: e.measure.name(),
                        value: sig12(e.value),
                    });
                }
            }
            let out = Estimates { estimates: rows };
            render(cli.format, &out, || Out {
                header: vec!["index", "measure", "value"],
                rows: out
                    .estimates
                    .iter()
                    .map(|r| vec![r.index.to_string(), r.measure.to_string(), fmt_num(r.value)])
                    .collect(),
            })?
        }
        Command::Test(a) | Command::Screen(a) => {
            let ds = load_dataset(&a.data.input)?;
            let seed = resolve_seed(cli.seed);
            let report = Report::from_screening(&screen(&ds, a.method, &test_params(a), a.alpha, seed)?, seed);
            if matches!(cli.command, Command::Test(_)) {
                let short = TestReport {
                    method: &report.method,
                    alpha: report.alpha,
                    seed,
                    per_input: &report.per_input,
                };
                render(cli.format, &short, || report_table(&report))?
            } else {
                render(cli.format, &report, || report_table(&report))?
            }
        }
        Command::Lasso(a) => {
            let ds = load_dataset(&a.data.input)?;
            let seed = resolve_seed(cli.seed);
            let config = CvConfig {
                folds: a.folds as usize,
                grid_len: a.grid as usize,
                sigma_weight: a.sigma_weight,
                ..CvConfig::default()
            };
            let report = Report::from_screening(&hsic_lasso_screen(&ds, a.cv_mode.into(), &config, seed)?, seed);
            render(cli.format, &report, || report_table(&report))?
        }
        Command::CoefTest(a) => {
            let ds = load_dataset(&a.data.input)?;
            let seed = resolve_seed(cli.seed);
            let report = Report::from_screening(
                &coefficient_screen(&ds, a.measure.into(), a.resamples, a.alpha, seed)?,
                seed,
            );
            render(cli.format, &report, || report_table(&report))?
        }
        Command::Bench(a) => bench(cli, a)?,
    };
    write_output(cli.output.as_deref(), &content)
}

fn share_rows(tables: &[ShareTable]) -> Vec<ShareRow> {
    let mut rows = Vec::new();
    for t in tables {
        for (m, measure) in t.measures.iter().enumerate() {
            for (i, &input) in t.inputs.iter().enumerate() {
                rows.push(ShareRow {
                    model: t.model.clone(),
                    input: format!("X{}", input + 1),
                    measure: measure.name(),
                    value: sig12(t.values[m][i]),
                    share: sig12(t.shares[m][i]),
                    sobol_total: sig12(t.sobol_total[i]),
                });
            }
        }
    }
    rows
}

fn share_table(rows: &[ShareRow]) -> Out {
    Out {
        header: vec!["model", "input", "measure", "value", "share_percent", "sobol_total"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.model.clone(),
                    r.input.clone(),
                    r.measure.to_string(),
                    fmt_num(r.value),
                    fmt_num(r.share),
                    fmt_num(r.sobol_total),
                ]
            })
            .collect(),
    }
}

fn rounded(mut m: MetricsReport) -> MetricsReport {
    m.non_influential_rate = sig12(m.non_influential_rate);
    m.influential_rate = sig12(m.influential_rate);
    m.perfect_screening_rate = sig12(m.perfect_screening_rate);
    m.selection_rates.iter_mut().for_each(|r| *r = sig12(*r));
    m
}

fn metrics_table(rows: &[MetricsReport]) -> Out {
    Out {
        header: vec![
            "method",
            "n",
            "d",
            "d_check",
            "repetitions",
            "non_influential_rate",
            "influential_rate",
            "perfect_screening_rate",
        ],
        rows: rows
            .iter()
            .map(|m| {
                vec![
                    m.method.clone(),
                    m.n.to_string(),
                    m.d.to_string(),
                    m.d_check.to_string(),
                    m.repetitions.to_string(),
                    fmt_num(m.non_influential_rate),
                    fmt_num(m.influential_rate),
                    fmt_num(m.perfect_screening_rate),
                ]
            })
            .collect(),
    }
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<String, CliError> {
    let seed = resolve_seed(cli.seed);
    let scale = if a.quick { Scale::Quick } else { Scale::Full };
    let (number, name) = match a.table {
        Table::Table1 => (1, "table1"),
        Table::Table2 => (2, "table2"),
        Table::Table3 => (3, "table3"),
        Table::Table4 => (4, "table4"),
    };
    let reps = a.repetitions.map_or_else(|| repetitions(number, scale), |r| r as usize);
    match a.table {
        Table::Table1 | Table::Table2 => {
            let tables = if a.table == Table::Table1 {
                let measures = a.measures.clone().unwrap_or_else(|| TABLE1_MEASURES.to_vec());
                table1(a.sample_size, reps, &measures, seed)?
            } else {
                let alphas = a.alphas.clone().unwrap_or_else(|| TABLE2_ALPHAS.to_vec());
                table2(&alphas, a.sample_size, reps, seed)?
            };
            let out = BenchOutput {
                table: name,
                seed,
                repetitions: reps,
                rows: share_rows(&tables),
            };
            render(cli.format, &out, || share_table(&out.rows))
        }
        Table::Table3 | Table::Table4 => {
            let reports = if a.table == Table::Table3 {
                let methods = match &a.methods {
                    Some(ms) => ms
                        .iter()
                        .map(|m| match m {
                            ExperimentMethod::Test(t) => Ok(*t),
                            ExperimentMethod::Lasso(_) => {
                                Err(CliError::Schema(format!("{m} is not an independence test")))
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    None => TABLE3_METHODS.to_vec(),
                };
                table3(
                    a.sizes.as_deref().unwrap_or(&TABLE3_SIZES),
                    a.ratios.as_deref().unwrap_or(&TABLE3_RATIOS),
                    &methods,
                    reps,
                    table3_params(a.draws, a.resamples),
                    a.alpha,
                    seed,
                )?
            } else {
                table4(
                    a.sizes.as_deref().unwrap_or(&TABLE4_SIZES),
                    a.methods.as_deref().unwrap_or(&TABLE4_METHODS),
                    reps,
                    a.resamples,
                    a.alpha,
                    seed,
                )?
            };
            let out = BenchOutput {
                table: name,
                seed,
                repetitions: reps,
                rows: reports.into_iter().map(rounded).collect(),
            };
            render(cli.format, &out, || metrics_table(&out.rows))
        }
    }
}
