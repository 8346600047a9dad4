//! Lawson-Hanson active-set NNLS on the normal equations.

use super::{solve_spd, submatrix, FitResult, LocalDesign, NormalEquations};
use crate::error::{Error, Result};

/// Relative size of a correlation treated as zero when testing optimality.
const KKT_REL: f64 = 1e-11;

pub fn nnls_fit(design: &LocalDesign) -> Result<FitResult> {
    let eq = design.normal_equations();
    Ok(eq.fit_result(nnls_normal(&eq)?))
}

/// `argmin_{beta >= 0} rr - 2 beta^T c + beta^T G beta`.
pub fn nnls_normal(eq: &NormalEquations) -> Result<Vec<f64>> {
    let d = eq.d;
    let budget = 10 * d.max(1);
    let mut x = vec![0.0; d];
    let mut passive: Vec<usize> = Vec::new();
    let mut blocked = vec![false; d];
    let tol = KKT_REL * eq.rr.max(f64::MIN_POSITIVE);

    for _ in 0..budget {
        let w = eq.correlations(&x);
        let candidate = (0..d)
            .filter(|&j| !blocked[j] && !passive.contains(&j) && w[j] > tol)
            .fold(None, |best: Option<usize>, j| match best {
                Some(b) if w[b] >= w[j] => Some(b),
                _ => Some(j),
            });
        let Some(j) = candidate else {
            return Ok(x);
        };
        passive.push(j);
        passive.sort_unstable();

        let mut inner = 0;
        loop {
            inner += 1;
            if inner > budget + d {
                return Err(Error::NonConvergence {
                    routine: "nnls inner loop",
                    iterations: inner,
                });
            }
            let cp: Vec<f64> = passive.iter().map(|&i| eq.c[i]).collect();
            let Some(z) = solve_spd(&submatrix(eq, &passive), &cp) else {
                // The new column is numerically dependent on the passive set.
                passive.retain(|&i| i != j);
                blocked[j] = true;
                break;
            };
            if z.iter().all(|&v| v > 0.0) {
                for (&i, &v) in passive.iter().zip(&z) {
                    x[i] = v;
                }
                break;
            }
            let mut step = 1.0_f64;
            for (&i, &zi) in passive.iter().zip(&z) {
                if zi <= 0.0 {
                    step = step.min(x[i] / (x[i] - zi));
                }
            }
            for (&i, &zi) in passive.iter().zip(&z) {
                x[i] += step * (zi - x[i]);
            }
            let dropped: Vec<usize> = passive
                .iter()
                .copied()
                .filter(|&i| x[i] <= 1e-15 * (1.0 + x[i].abs()))
                .collect();
            for i in &dropped {
                x[*i] = 0.0;
            }
            passive.retain(|i| !dropped.contains(i));
        }
    }
    let w = eq.correlations(&x);
    if (0..d).any(|j| !passive.contains(&j) && !blocked[j] && w[j] > tol) {
        return Err(Error::NonConvergence {
            routine: "nnls",
            iterations: budget,
        });
    }
    Ok(x)
}
