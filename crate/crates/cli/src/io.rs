use std::fs;
use std::io::Write;
use std::path::Path;

use depscreen::{DataColumn, Dataset};
use serde::{Deserialize, Serialize};

use crate::args::Format;

pub const MIN_ROWS: usize = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: u64, message: String },
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Core(#[from] depscreen::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

enum Role {
    Input(usize),
    Output,
}

fn column_role(name: &str) -> Result<Role, CliError> {
    if let Some(rest) = name.strip_prefix('x') {
        if let Ok(k) = rest.parse::<usize>() {
            if k >= 1 {
                return Ok(Role::Input(k));
            }
        }
    } else if name.starts_with('y') {
        return Ok(Role::Output);
    }
    Err(CliError::Schema(format!(
        "unrecognized column `{name}` (expected x1..xd or y-prefixed names)"
    )))
}

/// Reads a CSV file whose header names inputs `x1..xd` and output
/// coordinates `y...`.
pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Schema(format!("{shown}: {e}")),
            _ => CliError::Csv(e),
        })?;
    let header = reader.headers()?.clone();
    let mut inputs: Vec<Option<usize>> = Vec::new();
    let mut outputs: Vec<usize> = Vec::new();
    for (pos, name) in header.iter().enumerate() {
        match column_role(name)? {
            Role::Input(k) => {
                if inputs.len() < k {
                    inputs.resize(k, None);
                }
                if inputs[k - 1].replace(pos).is_some() {
                    return Err(CliError::Schema(format!("duplicate column `{name}`")));
                }
            }
            Role::Output => outputs.push(pos),
        }
    }
    if outputs.is_empty() {
        return Err(CliError::Schema(format!(
            "{shown}: no output column (names starting with `y`)"
        )));
    }
    if inputs.is_empty() {
        return Err(CliError::Schema(format!("{shown}: no input column (x1..xd)")));
    }
    let inputs: Vec<usize> = inputs
        .iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| CliError::Schema(format!("{shown}: missing column `x{}`", k + 1))))
        .collect::<Result<_, _>>()?;

    let mut x: Vec<Vec<f64>> = vec![Vec::new(); inputs.len()];
    let mut y: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            CliError::Parse {
                path: shown.clone(),
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |pos: usize| -> Result<f64, CliError> {
            let raw = record.get(pos).unwrap_or("");
            let bad = |what: &str| CliError::Parse {
                path: shown.clone(),
                line,
                message: format!("column `{}`: {what} `{raw}`", &header[pos]),
            };
            let v: f64 = raw.parse().map_err(|_| bad("not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad("non-finite value"))
            }
        };
        for (col, &pos) in x.iter_mut().zip(&inputs) {
            col.push(cell(pos)?);
        }
        y.push(outputs.iter().map(|&pos| cell(pos)).collect::<Result<_, _>>()?);
    }
    if y.len() < MIN_ROWS {
        return Err(CliError::Schema(format!(
            "{shown}: at least {MIN_ROWS} data rows are required, found {}",
            y.len()
        )));
    }
    let inputs = x
        .iter()
        .map(|c| DataColumn::from_scalars(c))
        .collect::<Result<Vec<_>, _>>()?;
    let output = if outputs.len() == 1 {
        DataColumn::from_scalars(&y.iter().map(|r| r[0]).collect::<Vec<_>>())?
    } else {
        DataColumn::from_rows(&y)?
    };
    Ok(Dataset::new(inputs, output)?)
}

/// Rounds to 12 significant digits; non-finite values pass through.
pub fn sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = sig12(v);
    let a = r.abs();
    if r != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

/// Floats that may be infinite: numbers when finite, strings otherwise.
mod extended {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Number(*v).serialize(s)
        } else {
            Repr::Text(super::fmt_num(*v)).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "NaN" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("bad number `{t}`"))),
            },
        }
    }
}

/// One input's decision. `index` is 1-based, matching the `x` column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: usize,
    #[serde(with = "extended")]
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub method: String,
    pub alpha: Option<f64>,
    pub seed: u64,
    pub per_input: Vec<ReportRow>,
    pub selected: Vec<usize>,
}

impl Report {
    pub fn from_screening(report: &depscreen::indep_tests::ScreeningReport, seed: u64) -> Self {
        Self {
            method: report.method.clone(),
            alpha: report.alpha,
            seed,
            per_input: report
                .per_input
                .iter()
                .map(|d| ReportRow {
                    index: d.index + 1,
                    statistic: sig12(d.statistic),
                    p_value: d.p_value.map(sig12),
                    reject: d.reject,
                })
                .collect(),
            selected: report.selected.iter().map(|k| k + 1).collect(),
        }
    }
}

/// Tabular output: a header and string cells.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn report_table(report: &Report) -> Table {
    Table {
        header: vec!["method", "alpha", "seed", "index", "statistic", "p_value", "reject"],
        rows: report
            .per_input
            .iter()
            .map(|r| {
                vec![
                    report.method.clone(),
                    report.alpha.map(fmt_num).unwrap_or_default(),
                    report.seed.to_string(),
                    r.index.to_string(),
                    fmt_num(r.statistic),
                    r.p_value.map(fmt_num).unwrap_or_default(),
                    r.reject.to_string(),
                ]
            })
            .collect(),
    }
}

/// Serializes either as CSV (from `table`) or pretty JSON (from `value`).
pub fn render<T: Serialize>(format: Format, value: &T, table: impl FnOnce() -> Table) -> Result<String, CliError> {
    match format {
        Format::Csv => table().to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value)?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
