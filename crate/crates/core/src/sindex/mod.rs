//! Single-index regression of wavelet features on covariates.
//!
//! The index direction is estimated by profiling: for a candidate unit vector
//! the link is the Nadaraya-Watson smoother of the centered features against
//! the projected covariates, and the pooled squared error over every feature
//! column is minimized over the sphere. One link is shared by all columns.

mod effect;
mod fit;
mod kernel;
pub mod optim;

pub use effect::{adjust_curves, covariate_effect, link_error, log_odds, CovariateEffect};
pub use fit::{
    fit_gamma, fit_gamma_constrained, profile_loss, residuals, Bandwidth, IndexFit, IndexOptions,
};
pub use kernel::{gaussian, nadaraya_watson, rule_of_thumb, std_dev, DENOMINATOR_FLOOR};

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// Per-region covariates, one row per region.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariates {
    names: Vec<String>,
    data: Array2<f64>,
    standardized: bool,
}

impl Covariates {
    pub fn new(names: Vec<String>, data: Array2<f64>) -> Result<Self> {
        let (n, d) = data.dim();
        if d == 0 || n == 0 {
            return Err(Error::EmptyInput("covariate matrix is empty".into()));
        }
        if names.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "{} covariate names for {d} columns",
                names.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(pos));
        }
        Ok(Covariates {
            names,
            data,
            standardized: false,
        })
    }

    /// Unnamed covariates (`x1..xd`).
    pub fn from_matrix(data: Array2<f64>) -> Result<Self> {
        let names = (1..=data.ncols()).map(|k| format!("x{k}")).collect();
        Self::new(names, data)
    }

    /// Z-scores every column.
    pub fn standardize(&self) -> Result<Self> {
        let mut data = self.data.clone();
        for (k, mut col) in data.axis_iter_mut(Axis(1)).enumerate() {
            let values: Vec<f64> = col.to_vec();
            let sd = std_dev(&values);
            if sd <= 0.0 {
                return Err(Error::DegenerateCovariates(k));
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            col.mapv_inplace(|v| (v - mean) / sd);
        }
        Ok(Covariates {
            names: self.names.clone(),
            data,
            standardized: true,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.data.row(i)
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    /// `X gamma`.
    pub fn project(&self, gamma: &[f64]) -> Vec<f64> {
        self.data
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(gamma).map(|(x, g)| x * g).sum())
            .collect()
    }

    pub(crate) fn check_variance(&self) -> Result<()> {
        for (k, col) in self.data.axis_iter(Axis(1)).enumerate() {
            let first = col[0];
            if col.iter().all(|v| *v == first) {
                return Err(Error::DegenerateCovariates(k));
            }
        }
        Ok(())
    }
}

/// Subtracts each column's mean.
pub fn center_features(features: &Array2<f64>) -> Result<Array2<f64>> {
    let n = features.nrows();
    if n < 2 || features.ncols() == 0 {
        return Err(Error::EmptyInput(format!(
            "need at least two rows to center, got {n}"
        )));
    }
    let means = features.mean_axis(Axis(0)).expect("nonempty");
    Ok(features - &means.insert_axis(Axis(0)))
}
