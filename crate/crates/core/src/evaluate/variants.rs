use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::npmix::{fit_mixture, map_assign, MixtureModel, MixtureOptions, Partition, Posteriors};
use crate::sindex::{
    adjust_curves, center_features, covariate_effect, fit_gamma, residuals, CovariateEffect,
    Covariates, IndexFit, IndexOptions,
};
use crate::wavelet::{featurize_batch, Curve, Transform, WaveletFilter};

/// The full method and its ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Translation-invariant features, covariate residualization, mixture.
    Crftiw,
    /// Orthogonal (shift-sensitive) wavelet features instead.
    NoTi,
    /// No covariate adjustment: clusters the centered features.
    NoCov,
    /// Adjusts the raw curves on a regression of their time mean first.
    AdjustFirst,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Crftiw,
        Method::NoTi,
        Method::NoCov,
        Method::AdjustFirst,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Crftiw => "crftiw",
            Method::NoTi => "noTI",
            Method::NoCov => "noCov",
            Method::AdjustFirst => "adjustFirst",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "crftiw" => Ok(Method::Crftiw),
            "noti" => Ok(Method::NoTi),
            "nocov" => Ok(Method::NoCov),
            "adjustfirst" => Ok(Method::AdjustFirst),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Settings shared by every stage.
#[derive(Debug, Clone, Default)]
pub struct StageOptions {
    pub filter: WaveletFilter,
    pub index: IndexOptions,
    pub mixture: MixtureOptions,
}

/// Everything a variant produced.
#[derive(Debug, Clone)]
pub struct VariantOutcome {
    pub method: Method,
    pub features: Array2<f64>,
    /// The matrix handed to the mixture.
    pub residuals: Array2<f64>,
    pub index_fit: Option<IndexFit>,
    /// Multiplicative covariate effect, when the method estimates one.
    pub effect: Option<CovariateEffect>,
    pub model: MixtureModel,
    pub posteriors: Posteriors,
    pub partition: Partition,
}

fn time_means(curves: &[Curve]) -> Result<Array2<f64>> {
    let mut out = Array2::zeros((curves.len(), 1));
    for (i, c) in curves.iter().enumerate() {
        let mean = c.values().iter().sum::<f64>() / c.len().max(1) as f64;
        if !(mean > 0.0) {
            return Err(Error::NonPositiveEffect(i));
        }
        out[[i, 0]] = mean.ln();
    }
    Ok(out)
}

/// Output of the feature and regression stages of a variant.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub method: Method,
    pub features: Array2<f64>,
    /// The matrix handed to the mixture.
    pub residuals: Array2<f64>,
    pub index_fit: Option<IndexFit>,
    pub effect: Option<CovariateEffect>,
}

/// Runs the stages of `method` that precede the mixture.
pub fn prepare_variant(
    method: Method,
    curves: &[Curve],
    covariates: Option<&Covariates>,
    opts: &StageOptions,
) -> Result<Prepared> {
    let need_cov = || {
        covariates.ok_or_else(|| Error::InvalidConfig(format!("method {method} needs covariates")))
    };
    let (features, residual_matrix, index_fit, effect) = match method {
        Method::Crftiw | Method::NoTi => {
            let transform = if method == Method::Crftiw {
                Transform::TranslationInvariant
            } else {
                Transform::Orthogonal
            };
            let cov = need_cov()?;
            let features = featurize_batch(curves, &opts.filter, transform)?;
            let fit = fit_gamma(&features, cov, &opts.index)?;
            let res = residuals(&fit)?;
            let effect = covariate_effect(&fit, cov)?;
            (features, res, Some(fit), Some(effect))
        }
        Method::NoCov => {
            let features = featurize_batch(curves, &opts.filter, Transform::TranslationInvariant)?;
            let centered = center_features(&features)?;
            (features, centered, None, None)
        }
        Method::AdjustFirst => {
            let cov = need_cov()?;
            let fit = fit_gamma(&time_means(curves)?, cov, &opts.index)?;
            let effect = covariate_effect(&fit, cov)?;
            let adjusted = adjust_curves(curves, &effect)?;
            let features =
                featurize_batch(&adjusted, &opts.filter, Transform::TranslationInvariant)?;
            let centered = center_features(&features)?;
            (features, centered, Some(fit), Some(effect))
        }
    };
    Ok(Prepared {
        method,
        features,
        residuals: residual_matrix,
        index_fit,
        effect,
    })
}

/// Runs `method` on curves and covariates with `l` clusters.
pub fn run_variant(
    method: Method,
    curves: &[Curve],
    covariates: Option<&Covariates>,
    l: usize,
    opts: &StageOptions,
) -> Result<VariantOutcome> {
    let prepared = prepare_variant(method, curves, covariates, opts)?;
    let (model, posteriors) = fit_mixture(&prepared.residuals, l, &opts.mixture)?;
    let partition = map_assign(&posteriors);
    Ok(VariantOutcome {
        method,
        features: prepared.features,
        residuals: prepared.residuals,
        index_fit: prepared.index_fit,
        effect: prepared.effect,
        model,
        posteriors,
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn time_means_need_positive_curves() {
        let c = vec![Curve::new(vec![1.0, -3.0]).unwrap()];
        assert_eq!(time_means(&c).unwrap_err(), Error::NonPositiveEffect(0));
    }
}
