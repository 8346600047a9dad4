//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain binary
//! so every line is printed even when an earlier criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use depscreen::benchmarks::{
    analytic_sobol_interaction, elementary, interaction_model, table1, table2, table3, table3_cell, table3_params,
    table4, ElementaryKind, ExperimentMethod, MetricsReport, ShareTable, TABLE3_RATIOS, TABLE3_SIZES,
};
use depscreen::gram::{empirical_bandwidth, gaussian_gram};
use depscreen::indep_tests::{
    gamma_fit, null_spectrum, permutation_test, spectral_null_sample, MeasureKind, ResampleMode, TestMethod,
};
use depscreen::local_regression::{
    build_design, lars_positive_path, lars_positive_path_normal, nnls_normal, objective_expand, CvMode, LocalDesign,
    LocalMeasure, NormalEquations,
};
use depscreen::measures::{dcov2, hsic_empirical, Measure};
use depscreen::rng::{stream, StreamRng};
use depscreen::{DataColumn, Dataset};
use rand::Rng;

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Check);

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new() -> Self {
        Self {
            pass: true,
            detail: String::new(),
        }
    }

    fn require(&mut self, ok: bool, what: String) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&what);
        if !ok {
            self.detail.push_str(" [x]");
            self.pass = false;
        }
    }
}

fn column(v: &[f64]) -> DataColumn {
    DataColumn::from_scalars(v).unwrap()
}

fn uniform(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()
}

fn naive_dcov2(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let nf = n as f64;
    let (mut s1, mut sx, mut sy, mut s3) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = ((x[i] - x[j]).abs(), (y[i] - y[j]).abs());
            s1 += a * b;
            sx += a;
            sy += b;
            for k in 0..n {
                s3 += a * (y[i] - y[k]).abs();
            }
        }
    }
    s1 / (nf * nf) + (sx / (nf * nf)) * (sy / (nf * nf)) - 2.0 * s3 / (nf * nf * nf)
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

/// `Tr(K_x H K_y H) / n^2` with dense matrices.
fn dense_hsic(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let var = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / n as f64;
        v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / n as f64
    };
    let kernel = |v: &[f64]| {
        let s = var(v);
        (0..n)
            .map(|i| (0..n).map(|j| (-(v[i] - v[j]).powi(2) / s).exp()).collect())
            .collect::<Vec<Vec<f64>>>()
    };
    let h: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) - 1.0 / n as f64).collect())
        .collect();
    let m = matmul(&matmul(&matmul(&kernel(x), &h), &kernel(y)), &h);
    (0..n).map(|i| m[i][i]).sum::<f64>() / (n * n) as f64
}

fn c1_oracles() -> Check {
    let mut rng = stream(SEED, &[1]);
    let (mut e_dcov, mut e_hsic, mut e_expand) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let n = rng.random_range(6..=20);
        let (x, z, y) = (uniform(&mut rng, n), uniform(&mut rng, n), uniform(&mut rng, n));
        let (cx, cy) = (column(&x), column(&y));
        e_dcov = e_dcov.max((dcov2(&cx, &cy).unwrap().value - naive_dcov2(&x, &y)).abs());
        e_hsic = e_hsic.max((hsic_empirical(&cx, &cy).unwrap().value - dense_hsic(&x, &y)).abs());
        let ds = Dataset::new(vec![cx, column(&z)], cy).unwrap();
        let beta = [rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)];
        for m in [LocalMeasure::Hsic, LocalMeasure::Dcov, LocalMeasure::Covariance] {
            let frob = build_design(&ds, m).unwrap().frobenius_objective(&beta) / (n * n) as f64;
            e_expand = e_expand.max((objective_expand(&beta, &ds, m).unwrap() - frob).abs());
        }
    }
    let mut c = Check::new();
    c.require(e_dcov <= 1e-10, format!("dcov2 max err {e_dcov:.1e}"));
    c.require(e_hsic <= 1e-10, format!("hsic max err {e_hsic:.1e}"));
    c.require(e_expand <= 1e-10, format!("expansion max err {e_expand:.1e}"));
    c
}

fn share(t: &ShareTable, m: Measure, i: usize) -> f64 {
    let row = t.measures.iter().position(|&x| x == m).unwrap();
    t.shares[row][i]
}

fn value(t: &ShareTable, m: Measure, i: usize) -> f64 {
    let row = t.measures.iter().position(|&x| x == m).unwrap();
    t.values[row][i]
}

fn c2_table1() -> Check {
    let expected: [(&[f64], &[f64]); 4] = [
        (&[62.0, 38.0], &[57.0, 43.0]),
        (&[55.0, 45.0], &[63.0, 37.0]),
        (&[44.0, 56.0], &[56.0, 44.0]),
        (&[38.0, 31.0, 31.0], &[41.0, 35.0, 24.0]),
    ];
    let tables = table1(1000, 100, &[Measure::Hsic, Measure::Dcor2], SEED).unwrap();
    let mut c = Check::new();
    for (t, (hsic, dcor)) in tables.iter().zip(expected) {
        for (m, want) in [(Measure::Hsic, hsic), (Measure::Dcor2, dcor)] {
            let got: Vec<f64> = (0..want.len()).map(|i| share(t, m, i)).collect();
            let ok = got.iter().zip(want).all(|(g, w)| (g - w).abs() <= 3.0);
            let shown: Vec<String> = got.iter().map(|g| format!("{g:.1}")).collect();
            c.require(ok, format!("{} {} ({})", t.model, m.name(), shown.join(",")));
        }
    }
    c
}

fn c3_table2() -> Check {
    let alphas = [0.0, 1.0, 2.0, 10.0];
    let expected = [(0.0965, 0.0003), (0.0293, 0.0309), (0.0071, 0.0250), (0.0130, 0.0164)];
    let tables = table2(&alphas, 1000, 50, SEED).unwrap();
    let mut c = Check::new();
    for ((t, a), (w1, w2)) in tables.iter().zip(alphas).zip(expected) {
        let (h1, h2) = (value(t, Measure::Hsic, 0), value(t, Measure::Hsic, 1));
        let ok = (h1 - w1).abs() <= 0.01 && (h2 - w2).abs() <= 0.01;
        c.require(ok, format!("alpha {a}: hsic ({h1:.4},{h2:.4})"));
    }
    let h = |k: usize, i: usize| value(&tables[k], Measure::Hsic, i);
    c.require(
        h(0, 0) > h(0, 1) && h(1, 1) > h(1, 0) && h(2, 1) > h(2, 0),
        "ordering flip".into(),
    );
    let (b1, b2) = (
        value(&tables[1], Measure::BorgonovoDelta, 0),
        value(&tables[1], Measure::BorgonovoDelta, 1),
    );
    c.require(
        (b1 - 0.4110).abs() <= 0.05 && (b2 - 0.4530).abs() <= 0.05,
        format!("borgonovo alpha 1 ({b1:.3},{b2:.3})"),
    );
    c
}

fn find<'a>(rows: &'a [MetricsReport], method: &str, n: usize, d_check: usize) -> &'a MetricsReport {
    rows.iter()
        .find(|r| r.method == method && r.n == n && r.d_check == d_check)
        .unwrap()
}

fn c4_table3() -> Check {
    let reps = 200;
    let params = table3_params(5000, 500);
    let mut c = Check::new();
    let main = table3_cell(
        100,
        2,
        &[TestMethod::HsicGamma, TestMethod::DcovQuantile],
        reps,
        params,
        0.05,
        SEED,
    )
    .unwrap();
    let g = find(&main, "hsic-gamma", 100, 10);
    c.require(
        (3.0..=8.0).contains(&g.non_influential_rate),
        format!("hsic-gamma type-I {:.1}", g.non_influential_rate),
    );
    c.require(
        g.influential_rate >= 91.0,
        format!("hsic-gamma power {:.1}", g.influential_rate),
    );
    let q = find(&main, "dcov-quantile", 100, 10);
    c.require(
        q.non_influential_rate <= 3.5,
        format!("dcov-quantile type-I {:.1}", q.non_influential_rate),
    );
    c.require(
        q.influential_rate >= 95.0,
        format!("dcov-quantile power {:.1}", q.influential_rate),
    );
    let b = table3_cell(10, 2, &[TestMethod::DcovBootstrap], reps, params, 0.05, SEED).unwrap();
    let power = b[0].influential_rate;
    c.require(
        (17.0..=29.0).contains(&power),
        format!("dcov-bootstrap power n=10 {power:.1}"),
    );

    let sweep = table3(
        &TABLE3_SIZES,
        &TABLE3_RATIOS,
        &[TestMethod::HsicGamma],
        reps,
        params,
        0.05,
        SEED,
    )
    .unwrap();
    let perfect = |n: usize, r: usize| find(&sweep, "hsic-gamma", n, 5 * r).perfect_screening_rate;
    let tol = 5.0;
    let in_n = TABLE3_RATIOS.iter().all(|&r| {
        TABLE3_SIZES
            .windows(2)
            .all(|w| perfect(w[1], r) >= perfect(w[0], r) - tol)
    });
    let in_r = TABLE3_SIZES.iter().all(|&n| {
        TABLE3_RATIOS
            .windows(2)
            .all(|w| perfect(n, w[1]) <= perfect(n, w[0]) + tol)
    });
    let grid: Vec<String> = TABLE3_RATIOS
        .iter()
        .map(|&r| {
            let row: Vec<String> = TABLE3_SIZES.iter().map(|&n| format!("{:.0}", perfect(n, r))).collect();
            format!("r={r}:[{}]", row.join(","))
        })
        .collect();
    c.require(in_n && in_r, format!("perfect screening {}", grid.join(" ")));
    c
}

fn c5_table4() -> Check {
    let methods = [
        ExperimentMethod::Test(TestMethod::CoefficientBootstrap),
        ExperimentMethod::Lasso(CvMode::Standard),
        ExperimentMethod::Lasso(CvMode::Modified),
    ];
    let rows = table4(&[50, 100, 200], &methods, 200, 100, 0.05, SEED).unwrap();
    let mut c = Check::new();
    for n in [50, 100, 200] {
        let b = find(&rows, "coefficient-bootstrap", n, 5);
        c.require(
            b.non_influential_rate <= 7.0,
            format!("bootstrap type-I n={n} {:.1}", b.non_influential_rate),
        );
    }
    let std50 = find(&rows, "lasso-standard", 50, 5);
    let rates: Vec<String> = [50, 100, 200]
        .iter()
        .map(|&n| format!("{:.1}", find(&rows, "lasso-standard", n, 5).non_influential_rate))
        .collect();
    let ok = [50, 100, 200]
        .iter()
        .all(|&n| find(&rows, "lasso-standard", n, 5).non_influential_rate >= 50.0);
    c.require(ok, format!("standard lasso type-I [{}]", rates.join(",")));
    let mod50 = find(&rows, "lasso-modified", 50, 5);
    c.require(
        mod50.perfect_screening_rate > std50.perfect_screening_rate,
        format!(
            "perfect n=50 modified {:.1} vs standard {:.1}",
            mod50.perfect_screening_rate, std50.perfect_screening_rate
        ),
    );
    c
}

fn c6_calibration() -> Check {
    let mut c = Check::new();
    let reps = 1000;
    let mut p: Vec<f64> = (0..reps)
        .map(|r| {
            let mut rng = stream(SEED, &[6, r as u64]);
            let (x, y) = (uniform(&mut rng, 30), uniform(&mut rng, 30));
            permutation_test(
                MeasureKind::Dcov,
                &column(&x),
                &column(&y),
                500,
                0.05,
                ResampleMode::Permutation,
                &mut rng,
            )
            .unwrap()
            .p_value
        })
        .collect();
    p.sort_by(f64::total_cmp);
    let m = reps as f64;
    let ks = p
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / m - v).max(v - i as f64 / m))
        .fold(0.0, f64::max);
    let critical = 1.6276 / m.sqrt();
    c.require(ks < critical, format!("permutation KS {ks:.4} < {critical:.4}"));

    let mut rng = stream(SEED, &[6, u64::MAX]);
    let n = 30;
    let (x, y) = (column(&uniform(&mut rng, n)), column(&uniform(&mut rng, n)));
    let kx = gaussian_gram(&x, &empirical_bandwidth(&x).unwrap()).unwrap();
    let ky = gaussian_gram(&y, &empirical_bandwidth(&y).unwrap()).unwrap();
    let center = |g: &depscreen::GramMatrix| depscreen::gram::double_center(g).unwrap();
    let (lx, ly) = (
        null_spectrum(&center(&kx)).unwrap(),
        null_spectrum(&center(&ky)).unwrap(),
    );
    let draws = spectral_null_sample(&lx, &ly, n, 100_000, &mut rng).unwrap();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let target = lx.iter().sum::<f64>() * ly.iter().sum::<f64>() / (n * n) as f64;
    let rel = (mean / target - 1.0).abs();
    c.require(rel < 0.02, format!("spectral mean rel err {rel:.4}"));

    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let n = rng.random_range(10..60);
        let (x, y) = (column(&uniform(&mut rng, n)), column(&uniform(&mut rng, n)));
        let kx = gaussian_gram(&x, &empirical_bandwidth(&x).unwrap()).unwrap();
        let ky = gaussian_gram(&y, &empirical_bandwidth(&y).unwrap()).unwrap();
        let fit = gamma_fit(&kx, &ky).unwrap();
        let (ex, ey) = (kx.off_diagonal_mean(), ky.off_diagonal_mean());
        worst = worst.max((fit.shape * fit.scale - (1.0 + ex * ey - ex - ey)).abs());
    }
    c.require(worst <= 1e-9, format!("gamma mean identity err {worst:.1e}"));
    c
}

fn random_design(m: usize, d: usize, rng: &mut StreamRng) -> LocalDesign {
    let predictors: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let response = (0..m)
        .map(|i| predictors[0][i] + 0.5 * predictors[1][i] + 0.5 * rng.random_range(-1.0..1.0))
        .collect();
    LocalDesign {
        response,
        predictors,
        measure: LocalMeasure::Hsic,
        n: 0,
        d,
    }
}

/// Largest violation of the positive-lasso optimality conditions at `lambda`.
fn kkt_violation(eq: &NormalEquations, beta: &[f64], lambda: f64) -> f64 {
    let corr = eq.correlations(beta);
    (0..eq.d)
        .map(|k| {
            if beta[k] > 0.0 {
                (corr[k] - lambda).abs()
            } else {
                (corr[k] - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

fn c7_lars() -> Check {
    let mut rng = stream(SEED, &[7]);
    let (mut endpoint, mut kkt) = (0.0_f64, 0.0_f64);
    for _ in 0..20 {
        let design = random_design(60, 6, &mut rng);
        let eq = design.normal_equations();
        let path = lars_positive_path(&design).unwrap();
        let scale = eq.c.iter().fold(1.0_f64, |m, c| m.max(c.abs()));
        for (lambda, beta) in path.knots.iter().zip(&path.betas) {
            kkt = kkt.max(kkt_violation(&eq, beta, *lambda) / scale);
        }
        let nnls = nnls_normal(&eq).unwrap();
        let end = path.betas.last().unwrap();
        endpoint = endpoint.max(end.iter().zip(&nnls).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }

    let mut soft = 0.0_f64;
    for _ in 0..20 {
        let d = 5;
        let diag: Vec<f64> = (0..d).map(|_| rng.random_range(0.5..3.0)).collect();
        let c_vec: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..2.0)).collect();
        let mut g = vec![0.0; d * d];
        for k in 0..d {
            g[k * d + k] = diag[k];
        }
        let eq = NormalEquations {
            g,
            c: c_vec.clone(),
            rr: 10.0,
            d,
        };
        let path = lars_positive_path_normal(&eq).unwrap();
        let mut knots: Vec<f64> = c_vec.iter().copied().filter(|&v| v > 0.0).collect();
        knots.sort_by(|a, b| b.total_cmp(a));
        knots.push(0.0);
        if path.knots.len() != knots.len() {
            soft = f64::INFINITY;
            continue;
        }
        for (got, want) in path.knots.iter().zip(&knots) {
            soft = soft.max((got - want).abs());
        }
        for (lambda, beta) in path.knots.iter().zip(&path.betas) {
            for k in 0..d {
                let closed = (c_vec[k] - lambda).max(0.0) / diag[k];
                soft = soft.max((beta[k] - closed).abs());
            }
        }
    }
    let mut c = Check::new();
    c.require(endpoint <= 1e-6, format!("endpoint vs nnls {endpoint:.1e}"));
    c.require(soft <= 1e-8, format!("orthogonal soft-threshold {soft:.1e}"));
    c.require(kkt <= 1e-8, format!("kkt {kkt:.1e}"));
    c
}

/// Composite Simpson rule on `[-sqrt 3, sqrt 3]` returning the mean.
fn uniform_mean(f: impl Fn(f64) -> f64) -> f64 {
    let m = 20_000;
    let (a, b) = (-(3.0_f64.sqrt()), 3.0_f64.sqrt());
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0 / (b - a)
}

fn c8_functions() -> Check {
    let mut c = Check::new();
    for kind in ElementaryKind::ALL {
        let mean = uniform_mean(|x| elementary(kind, x));
        let var = uniform_mean(|x| elementary(kind, x).powi(2)) - mean * mean;
        c.require(
            mean.abs() <= 1e-6 && (var - 1.0).abs() <= 1e-6,
            format!("{kind:?} mean {mean:.1e} var-1 {:.1e}", var - 1.0),
        );
    }
    let mut rng = stream(SEED, &[8]);
    let root3 = 3.0_f64.sqrt();
    for alpha in [1.0, 2.0, 5.0] {
        let draws = 1_000_000;
        let ys: Vec<f64> = (0..draws)
            .map(|_| {
                interaction_model(
                    alpha,
                    [rng.random_range(-root3..root3), rng.random_range(-root3..root3)],
                )
            })
            .collect();
        let m = ys.iter().sum::<f64>() / draws as f64;
        let var = ys.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let m4 = ys.iter().map(|y| (y - m).powi(4)).sum::<f64>() / draws as f64;
        let se = ((m4 - var * var) / draws as f64).sqrt();
        let target = 1.0 + alpha * alpha;
        c.require(
            (var - target).abs() <= 4.0 * se,
            format!("alpha {alpha} var {var:.4} vs {target} (se {se:.4})"),
        );
    }
    let sobol: Vec<f64> = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|&a| analytic_sobol_interaction(a).unwrap().s2_total)
        .collect();
    let ok = sobol
        .iter()
        .zip([0.5, 0.8, 0.9615, 0.9901])
        .all(|(s, w)| (s - w).abs() < 5e-5);
    let shown: Vec<String> = sobol.iter().map(|s| format!("{s:.4}")).collect();
    c.require(ok, format!("total Sobol [{}]", shown.join(",")));
    c
}

fn cli(args: &[&str], threads: Option<&str>) -> Vec<u8> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_depscreen"));
    cmd.env_remove("DEPSCREEN_THREADS");
    if let Some(t) = threads {
        cmd.args(["--threads", t]);
    }
    let out = cmd.args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn c9_determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let mut rng = stream(SEED, &[9]);
    let mut text = String::from("x1,x2,x3,x4,y\n");
    for _ in 0..60 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
        let y = (3.0 * x[0]).sin() + x[1] * x[1] + 0.1 * rng.random_range(-1.0..1.0);
        text.push_str(&format!("{},{},{},{},{y}\n", x[0], x[1], x[2], x[3]));
    }
    std::fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "screen",
            "--input",
            p,
            "--method",
            "hsic-bootstrap",
            "--resamples",
            "200",
        ],
        vec!["screen", "--input", p, "--method", "dcov-spectral", "--draws", "2000"],
        vec!["lasso", "--input", p],
        vec!["coef-test", "--input", p, "--resamples", "100"],
        vec![
            "bench",
            "table3",
            "--quick",
            "--repetitions",
            "20",
            "--sizes",
            "25",
            "--ratios",
            "2",
            "--methods",
            "hsic-gamma,dcov-bootstrap",
        ],
    ];
    let mut c = Check::new();
    for inv in invocations {
        let mut args = inv.clone();
        args.extend(["--seed", "99", "--format", "json"]);
        let first = cli(&args, Some("1"));
        let repeat = cli(&args, Some("1"));
        let wide = cli(&args, Some("4"));
        let label: Vec<&str> = inv.iter().copied().filter(|a| *a != p && *a != "--input").collect();
        c.require(first == repeat && first == wide, label.join(" "));
    }
    c
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("estimator oracle equivalence", c1_oracles),
        ("sensitivity shares on additive models", c2_table1),
        ("interaction-model HSIC and delta", c3_table2),
        ("independence-test screening", c4_table3),
        ("local-regression screening", c5_table4),
        ("null-distribution calibration", c6_calibration),
        ("LARS and NNLS consistency", c7_lars),
        ("benchmark function certification", c8_functions),
        ("CLI determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let check = run();
        let verdict = if check.pass { "PASS" } else { "FAIL" };
        if !check.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {verdict} {name} ({:.1}s) {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            check.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
