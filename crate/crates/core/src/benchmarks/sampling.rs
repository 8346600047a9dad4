//! Input designs. Column `k` of repetition `r` is drawn from its own stream,
//! so enlarging `n` or adding columns leaves the existing draws unchanged.

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::DataColumn;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputDistribution {
    /// `U[-sqrt 3, sqrt 3]`: zero mean, unit variance.
    CenteredUniform,
    /// `U[0, 1]`.
    UnitUniform,
}

impl InputDistribution {
    fn uniform(self) -> Uniform<f64> {
        let (lo, hi) = match self {
            InputDistribution::CenteredUniform => (-3.0_f64.sqrt(), 3.0_f64.sqrt()),
            InputDistribution::UnitUniform => (0.0, 1.0),
        };
        Uniform::new(lo, hi).expect("bounds are finite and ordered")
    }
}

/// `count` i.i.d. columns of length `n`, column after column from `rng`.
pub fn sample_inputs<R: Rng + ?Sized>(
    n: usize,
    count: usize,
    dist: InputDistribution,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::InsufficientSample { needed: 1, found: 0 });
    }
    let u = dist.uniform();
    Ok((0..count).map(|_| u.sample_iter(&mut *rng).take(n).collect()).collect())
}

/// Nested design: column `k` comes from stream `(seed, tags ++ [k])`.
pub fn sample_columns(
    n: usize,
    count: usize,
    dist: InputDistribution,
    seed: u64,
    tags: &[u64],
) -> Result<Vec<Vec<f64>>> {
    let mut path = tags.to_vec();
    path.push(0);
    let last = path.len() - 1;
    (0..count)
        .map(|k| {
            path[last] = k as u64;
            let mut rng = rng::stream(seed, &path);
            sample_inputs(n, 1, dist, &mut rng).map(|mut c| c.pop().expect("one column"))
        })
        .collect()
}

pub fn to_columns(raw: &[Vec<f64>]) -> Result<Vec<DataColumn>> {
    raw.iter().map(|c| DataColumn::from_scalars(c)).collect()
}
