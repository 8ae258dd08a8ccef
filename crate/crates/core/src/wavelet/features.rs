use ndarray::Array2;

use super::{dwt_forward, tidwt_forward, Curve, WaveletFilter};
use crate::error::{Error, Result};

/// Bands whose Euclidean norm does not exceed this are rejected.
pub const DEFAULT_NORM_FLOOR: f64 = 1e-12;

/// `n x (J+1)` log-energy features, one row per curve.
pub type FeatureMatrix = Array2<f64>;

/// Which transform supplies the per-scale coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    /// Translation-invariant transform (shift-invariant features).
    #[default]
    TranslationInvariant,
    /// Orthogonal decimated transform.
    Orthogonal,
}

fn log_norms<'a>(bands: impl Iterator<Item = &'a [f64]>) -> Result<Vec<f64>> {
    bands
        .enumerate()
        .map(|(j, band)| {
            let norm = band.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm <= DEFAULT_NORM_FLOOR {
                Err(Error::DegenerateScale(j))
            } else {
                Ok(norm.ln())
            }
        })
        .collect()
}

/// `y_j = ln |theta_j|` for the translation-invariant bands `j = 0..=J`.
pub fn featurize_ti(curve: &Curve, filter: &WaveletFilter) -> Result<Vec<f64>> {
    let coeffs = tidwt_forward(curve, filter)?;
    log_norms(coeffs.bands())
}

/// Log norms of the orthogonal DWT, in the same band order as [`featurize_ti`]:
/// scaling coefficient first, then detail scales from finest to coarsest.
pub fn featurize_dwt(curve: &Curve, filter: &WaveletFilter) -> Result<Vec<f64>> {
    let levels = curve.dyadic_levels()?;
    let coeffs = dwt_forward(curve, filter, levels)?;
    let bands = std::iter::once(coeffs.scaling.as_slice())
        .chain(coeffs.details.iter().rev().map(Vec::as_slice));
    log_norms(bands)
}

/// Featurizes every curve; all curves must share one dyadic length.
pub fn featurize_batch(
    curves: &[Curve],
    filter: &WaveletFilter,
    transform: Transform,
) -> Result<FeatureMatrix> {
    let first = curves
        .first()
        .ok_or_else(|| Error::EmptyInput("no curves to featurize".into()))?;
    let width = first.dyadic_levels()? + 1;
    let mut out = Array2::zeros((curves.len(), width));
    for (i, curve) in curves.iter().enumerate() {
        if curve.len() != first.len() {
            return Err(Error::DimensionMismatch(format!(
                "curve {i} has length {}, expected {}",
                curve.len(),
                first.len()
            )));
        }
        let row = match transform {
            Transform::TranslationInvariant => featurize_ti(curve, filter)?,
            Transform::Orthogonal => featurize_dwt(curve, filter)?,
        };
        out.row_mut(i)
            .iter_mut()
            .zip(row)
            .for_each(|(dst, v)| *dst = v);
    }
    Ok(out)
}
