//! Nonparametric mixtures whose components are products of univariate
//! densities, fitted by majorization-minimization of a smoothed log-likelihood.

mod density;
mod fit;
mod kmeans;

pub use density::{
    convolve_density, log_smooth_density, smooth_density, DensityTable, DENSITY_FLOOR,
};
pub use fit::{
    default_bandwidths, fit_mixture, map_assign, posteriors, smoothed_loglik, Init, MixtureModel,
    MixtureOptions, Partition, Posteriors,
};
pub use kmeans::kmeans;

use crate::error::{Error, Result};

/// Elbow rule: the smallest `L` whose gain `l(L+1) - l(L)` falls below `tau`.
///
/// `loglik[k]` is the objective for `L = k + 1`. Returns `L_max` when every gain
/// reaches `tau`.
pub fn select_l(loglik: &[f64], tau: f64) -> Result<usize> {
    if loglik.len() < 2 {
        return Err(Error::TooFewValues(loglik.len()));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "elbow threshold {tau} must be positive"
        )));
    }
    Ok(loglik
        .windows(2)
        .position(|w| w[1] - w[0] < tau)
        .map_or(loglik.len(), |k| k + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elbow_examples() {
        let table = [
            -1034.0, -894.0, -815.0, -791.0, -774.0, -767.0, -754.0, -743.0, -733.0, -734.0,
        ];
        assert_eq!(select_l(&table, 15.0).unwrap(), 5);
        let flat: Vec<f64> = (0..6).map(|k| 10.0 * k as f64).collect();
        assert_eq!(select_l(&flat, 15.0).unwrap(), 1);
        let steep: Vec<f64> = (0..6)
            .map(|k| 20.0 * k as f64 + k as f64 * k as f64)
            .collect();
        assert_eq!(select_l(&steep, 15.0).unwrap(), 6);
        assert_eq!(select_l(&[1.0], 15.0).unwrap_err(), Error::TooFewValues(1));
        assert!(select_l(&[1.0, 2.0], 0.0).is_err());
    }
}
