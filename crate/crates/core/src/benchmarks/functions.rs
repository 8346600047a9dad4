//! Analytical test functions and their exact variance-based indices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Shapes of the one-dimensional effects, each centered with unit variance
/// when `x ~ U[-sqrt 3, sqrt 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementaryKind {
    Linear,
    Exponential,
    Sinusoidal,
}

impl ElementaryKind {
    pub const ALL: [ElementaryKind; 3] = [
        ElementaryKind::Linear,
        ElementaryKind::Exponential,
        ElementaryKind::Sinusoidal,
    ];
}

/// `(a, b)` of `h_2(x) = (e^x - a) / b`.
pub fn exponential_constants() -> (f64, f64) {
    let a = SQRT_3.sinh() / SQRT_3;
    let b = ((2.0 * SQRT_3).sinh() / (2.0 * SQRT_3) - a * a).sqrt();
    (a, b)
}

/// `a` of `h_3(x) = a sin(2x)`.
pub fn sinusoidal_constant() -> f64 {
    1.0 / (0.5 - (4.0 * SQRT_3).sin() / (8.0 * SQRT_3)).sqrt()
}

pub fn elementary(kind: ElementaryKind, x: f64) -> f64 {
    match kind {
        ElementaryKind::Linear => x,
        ElementaryKind::Exponential => {
            let (a, b) = exponential_constants();
            (x.exp() - a) / b
        }
        ElementaryKind::Sinusoidal => sinusoidal_constant() * (2.0 * x).sin(),
    }
}

/// `alpha_1 h_1(x_1) + alpha_2 h_2(x_2) + alpha_3 h_3(x_3)`.
pub fn additive_model(alpha: [f64; 3], x: [f64; 3]) -> f64 {
    ElementaryKind::ALL
        .iter()
        .zip(alpha.iter().zip(x))
        .map(|(&k, (&a, xi))| if a == 0.0 { 0.0 } else { a * elementary(k, xi) })
        .sum()
}

/// `h_2(x_1) + alpha h_2(x_1) h_2(x_2)`.
pub fn interaction_model(alpha: f64, x: [f64; 2]) -> f64 {
    let h1 = elementary(ElementaryKind::Exponential, x[0]);
    h1 + alpha * h1 * elementary(ElementaryKind::Exponential, x[1])
}

/// `(a, b)` of the Morris-type function with `k` influential inputs.
pub fn morris_constants(k: usize) -> (f64, f64) {
    let s = (0.1 * (k as f64 - 1.0)).sqrt();
    (12.0_f64.sqrt() - 6.0 * s, 12.0 * s)
}

/// `a (sum_{i<=d} x_i + b sum_{i<j<=d} x_i x_j)`; inputs past the first `d`
/// do not enter.
pub fn morris_model(d: usize, d_check: usize, x: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), d + d_check);
    let (a, b) = morris_constants(d);
    let z = &x[..d];
    let sum: f64 = z.iter().sum();
    let squares: f64 = z.iter().map(|v| v * v).sum();
    a * (sum + b * 0.5 * (sum * sum - squares))
}

/// First-order (= total) indices of the additive model.
pub fn analytic_sobol_additive(alpha: [f64; 3]) -> Result<[f64; 3]> {
    let total: f64 = alpha.iter().map(|a| a * a).sum();
    if total == 0.0 {
        return Err(Error::ZeroModel);
    }
    Ok(alpha.map(|a| a * a / total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionSobol {
    pub s1: f64,
    pub s2: f64,
    pub s1_total: f64,
    pub s2_total: f64,
}

pub fn analytic_sobol_interaction(alpha: f64) -> Result<InteractionSobol> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interaction weight must be >= 0, got {alpha}"
        )));
    }
    let v = 1.0 + alpha * alpha;
    Ok(InteractionSobol {
        s1: 1.0 / v,
        s2: 0.0,
        s1_total: 1.0,
        s2_total: alpha * alpha / v,
    })
}
