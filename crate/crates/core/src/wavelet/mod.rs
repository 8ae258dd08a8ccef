//! Periodic orthogonal and translation-invariant wavelet transforms, and the
//! per-scale log-energy features built on top of them.

mod dwt;
mod features;
mod filter;
mod tidwt;

pub use dwt::{dwt_forward, dwt_inverse, DwtCoefficients};
pub use features::{
    featurize_batch, featurize_dwt, featurize_ti, FeatureMatrix, Transform, DEFAULT_NORM_FLOOR,
};
pub use filter::WaveletFilter;
pub use tidwt::{parseval_check, tidwt_forward, TidwtCoefficients};

use crate::error::{Error, Result};

/// One sampled series.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    values: Vec<f64>,
}

impl Curve {
    /// Wraps `values`, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(pos));
        }
        Ok(Curve { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Returns `J = log2(T)`, or `NonDyadicLength` when `T` is not `2^J` with `J >= 2`.
    pub fn dyadic_levels(&self) -> Result<usize> {
        dyadic_levels(self.values.len())
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Curve {
        Curve {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

pub fn dyadic_levels(len: usize) -> Result<usize> {
    if len < 4 || !len.is_power_of_two() {
        return Err(Error::NonDyadicLength(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Circular shift `(S_h w)(t) = w(t + h) mod T`. Negative `h` rotates the other way.
pub fn circular_shift(curve: &Curve, h: i64) -> Curve {
    let len = curve.len();
    if len == 0 {
        return curve.clone();
    }
    let offset = h.rem_euclid(len as i64) as usize;
    let mut values = Vec::with_capacity(len);
    values.extend_from_slice(&curve.values[offset..]);
    values.extend_from_slice(&curve.values[..offset]);
    Curve { values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_examples() {
        let c = Curve::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(circular_shift(&c, 0), c);
        assert_eq!(circular_shift(&c, 4), c);
        assert_eq!(circular_shift(&c, 1).values(), &[2.0, 3.0, 4.0, 1.0]);
        assert_eq!(circular_shift(&c, -1).values(), &[4.0, 1.0, 2.0, 3.0]);
        assert_eq!(circular_shift(&c, 9).values(), &[2.0, 3.0, 4.0, 1.0]);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            Curve::new(vec![0.0, f64::NAN]).unwrap_err(),
            Error::NonFiniteInput(1)
        );
    }

    #[test]
    fn dyadic_detection() {
        assert_eq!(dyadic_levels(256).unwrap(), 8);
        assert_eq!(dyadic_levels(4).unwrap(), 2);
        assert!(matches!(dyadic_levels(2), Err(Error::NonDyadicLength(2))));
        assert!(matches!(
            dyadic_levels(100),
            Err(Error::NonDyadicLength(100))
        ));
    }
}
