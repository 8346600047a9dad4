//! Sample containers: one variable observed `n` times ([`DataColumn`]) and a
//! full input/output sample ([`Dataset`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` observations of a `q`-dimensional real variable, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataColumn {
    values: Vec<f64>,
    n: usize,
    dim: usize,
}

impl DataColumn {
    /// Builds a column from row-major values. Requires `n >= 2`, `dim >= 1`
    /// and finite entries.
    pub fn new(values: Vec<f64>, n: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidColumn("dimension must be at least 1".into()));
        }
        if n < 2 {
            return Err(Error::InsufficientSample { needed: 2, found: n });
        }
        if values.len() != n * dim {
            return Err(Error::DimensionMismatch {
                expected: n * dim,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidColumn(format!("non-finite value at row {}", pos / dim)));
        }
        Ok(Self { values, n, dim })
    }

    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    /// Builds a vector-valued column from per-row slices.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidColumn("ragged rows".into()));
        }
        Self::new(rows.concat(), rows.len(), dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The values of a scalar column, `None` when `dim > 1`.
    pub fn as_scalar(&self) -> Option<&[f64]> {
        (self.dim == 1).then_some(self.values.as_slice())
    }

    pub fn coordinate(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(j).step_by(self.dim).copied()
    }

    /// Rows selected (with repetition allowed) by `idx`.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(idx.len() * self.dim);
        for &i in idx {
            values.extend_from_slice(self.row(i));
        }
        Self::new(values, idx.len(), self.dim)
    }

    /// Multiplies every coordinate by `factor` and shifts by `offset`.
    pub fn affine(&self, factor: f64, offset: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| factor * v + offset).collect();
        Self::new(values, self.n, self.dim)
    }
}

/// `n` joint observations of `d` inputs and one (possibly vector) output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    inputs: Vec<DataColumn>,
    output: DataColumn,
}

impl Dataset {
    pub fn new(inputs: Vec<DataColumn>, output: DataColumn) -> Result<Self> {
        for col in &inputs {
            if col.len() != output.len() {
                return Err(Error::LengthMismatch {
                    left: col.len(),
                    right: output.len(),
                });
            }
        }
        Ok(Self { inputs, output })
    }

    pub fn n(&self) -> usize {
        self.output.len()
    }

    pub fn d(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[DataColumn] {
        &self.inputs
    }

    pub fn input(&self, k: usize) -> &DataColumn {
        &self.inputs[k]
    }

    pub fn output(&self) -> &DataColumn {
        &self.output
    }

    pub fn select_rows(&self, idx: &[usize]) -> Result<Self> {
        let inputs = self
            .inputs
            .iter()
            .map(|c| c.select_rows(idx))
            .collect::<Result<Vec<_>>>()?;
        Self::new(inputs, self.output.select_rows(idx)?)
    }

    /// Same sample with every column of scalar input `k` replaced.
    pub fn with_input(&self, k: usize, column: DataColumn) -> Result<Self> {
        let mut inputs = self.inputs.clone();
        inputs[k] = column;
        Self::new(inputs, self.output.clone())
    }

    pub fn into_parts(self) -> (Vec<DataColumn>, DataColumn) {
        (self.inputs, self.output)
    }
}
