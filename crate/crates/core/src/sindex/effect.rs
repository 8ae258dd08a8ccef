use super::{Covariates, IndexFit};
use crate::error::{Error, Result};
use crate::wavelet::Curve;

/// Multiplicative covariate effect per region, normalized to sample mean one.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariateEffect {
    pub values: Vec<f64>,
    /// Sample mean of `exp(link)` that was divided out.
    pub normalization: f64,
}

impl CovariateEffect {
    /// The neutral effect `mu = 1` for `n` regions.
    pub fn unit(n: usize) -> Self {
        CovariateEffect {
            values: vec![1.0; n],
            normalization: 1.0,
        }
    }
}

/// `exp(link(x_i^T gamma))`, rescaled so the values average to one.
pub fn covariate_effect(fit: &IndexFit, covariates: &Covariates) -> Result<CovariateEffect> {
    let raw: Vec<f64> = covariates
        .project(fit.gamma())
        .into_iter()
        .map(|u| fit.link(u).map(f64::exp))
        .collect::<Result<_>>()?;
    if raw.is_empty() {
        return Err(Error::EmptyInput("no covariate rows".into()));
    }
    let normalization = raw.iter().sum::<f64>() / raw.len() as f64;
    Ok(CovariateEffect {
        values: raw.iter().map(|v| v / normalization).collect(),
        normalization,
    })
}

/// Divides curve `i` pointwise by `effect.values[i]`.
pub fn adjust_curves(curves: &[Curve], effect: &CovariateEffect) -> Result<Vec<Curve>> {
    if curves.len() != effect.values.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} curves but {} effects",
            curves.len(),
            effect.values.len()
        )));
    }
    curves
        .iter()
        .zip(&effect.values)
        .enumerate()
        .map(|(i, (curve, &mu))| {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::NonPositiveEffect(i));
            }
            Curve::new(curve.values().iter().map(|v| v / mu).collect())
        })
        .collect()
}

/// `link(x^T gamma) - link(x'^T gamma)`, a log odds ratio between two regions.
pub fn log_odds(fit: &IndexFit, x: &[f64], x_other: &[f64]) -> Result<f64> {
    Ok(fit.link_at(x)? - fit.link_at(x_other)?)
}

/// Mean squared error of pairwise link differences against a known truth:
/// `n^{-2} sum_{i,i'} [(fit_i - fit_i') - (true_i - true_i')]^2`.
///
/// `true_link` must be on the same (log) scale as the fitted link.
pub fn link_error(
    fit: &IndexFit,
    true_link: impl Fn(f64) -> f64,
    true_gamma: &[f64],
    covariates: &Covariates,
) -> Result<f64> {
    let fitted: Vec<f64> = covariates
        .project(fit.gamma())
        .into_iter()
        .map(|u| fit.link(u))
        .collect::<Result<_>>()?;
    let truth: Vec<f64> = covariates
        .project(true_gamma)
        .into_iter()
        .map(true_link)
        .collect();
    Ok(pairwise_error(&fitted, &truth))
}

pub(crate) fn pairwise_error(fitted: &[f64], truth: &[f64]) -> f64 {
    let n = fitted.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for k in 0..n {
            let e = (fitted[i] - fitted[k]) - (truth[i] - truth[k]);
            total += e * e;
        }
    }
    total / (n * n) as f64
}
