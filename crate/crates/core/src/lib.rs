//! Dependence measures, independence tests and sparse local-measure
//! regression for screening the inputs of expensive numerical simulators.
//!
//! The building block is the [`gram::GramMatrix`]: every measure (HSIC,
//! distance covariance) is a Frobenius product of double-centered Grams, and
//! every test compares such a product against an approximation of its null
//! law. [`benchmarks`] holds the analytical test functions and the
//! Monte-Carlo harness used to calibrate the tests.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod data;
pub mod error;
pub mod gram;
pub mod local_regression;
pub mod measures;
pub mod rng;

pub use data::{DataColumn, Dataset};
pub use error::{Error, Result};
pub use gram::{BandwidthVector, GramKind, GramMatrix};
