//! Clustering of shifted functional data adjusted on covariates.
//!
//! The pipeline has three stages:
//!
//! 1. [`wavelet`]: per-scale log-energies of a translation-invariant wavelet
//!    transform, insensitive to circular shifts of the curves;
//! 2. [`sindex`]: a single-index kernel regression of those features on the
//!    covariates, whose residuals carry the cluster structure;
//! 3. [`npmix`]: a nonparametric mixture with conditionally independent
//!    coordinates, fitted by maximizing a smoothed log-likelihood.
//!
//! [`simulate`] and [`evaluate`] provide the synthetic scenarios, scoring and
//! ablation variants; [`cli`] wires everything for the command-line tool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod evaluate;
pub mod npmix;
pub mod simulate;
pub mod sindex;
pub mod wavelet;

pub use error::{Error, Result};
