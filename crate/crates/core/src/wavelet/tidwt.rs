use super::{Curve, WaveletFilter};
use crate::error::{Error, Result};

/// Translation-invariant (undecimated) wavelet coefficients.
///
/// Band 0 is the coarsest scaling band; band `j` for `1..=J` is the detail band
/// produced at decomposition level `j`, counted from the finest (`j = 1`). Every
/// band has `T` entries. Entry `t` of band `j` equals the decimated coefficient of
/// the circularly shifted curve `S_h w` whose phase matches `t mod 2^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TidwtCoefficients {
    pub scaling: Vec<f64>,
    pub details: Vec<Vec<f64>>,
}

impl TidwtCoefficients {
    /// Number of detail levels `J`.
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Band `j` (`0` = scaling, `1..=J` = details).
    pub fn band(&self, j: usize) -> &[f64] {
        if j == 0 {
            &self.scaling
        } else {
            &self.details[j - 1]
        }
    }

    pub fn bands(&self) -> impl Iterator<Item = &[f64]> {
        std::iter::once(self.scaling.as_slice()).chain(self.details.iter().map(Vec::as_slice))
    }

    /// `2^{-J} |theta_0|^2 + sum_j 2^{-j} |theta_j|^2`, the energy the tight frame preserves.
    pub fn weighted_energy(&self) -> f64 {
        let levels = self.levels() as i32;
        let sq = |band: &[f64]| band.iter().map(|c| c * c).sum::<f64>();
        let mut energy = sq(&self.scaling) * 2f64.powi(-levels);
        for (idx, band) in self.details.iter().enumerate() {
            energy += sq(band) * 2f64.powi(-(idx as i32 + 1));
        }
        energy
    }
}

/// Stationary (a trous) transform over all `J` levels, `O(T log T)`.
pub fn tidwt_forward(curve: &Curve, filter: &WaveletFilter) -> Result<TidwtCoefficients> {
    let levels = curve.dyadic_levels()?;
    let len = curve.len();
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut approx = curve.values().to_vec();
    let mut details = Vec::with_capacity(levels);
    for level in 0..levels {
        let step = 1usize << level;
        let mut next = vec![0.0; len];
        let mut detail = vec![0.0; len];
        for t in 0..len {
            let (mut a, mut d) = (0.0, 0.0);
            for k in 0..h.len() {
                let x = approx[(t + k * step) % len];
                a += h[k] * x;
                d += g[k] * x;
            }
            next[t] = a;
            detail[t] = d;
        }
        details.push(detail);
        approx = next;
    }
    Ok(TidwtCoefficients {
        scaling: approx,
        details,
    })
}

/// Relative deviation from the weighted Parseval identity.
pub fn parseval_check(curve: &Curve, coeffs: &TidwtCoefficients) -> Result<f64> {
    let energy: f64 = curve.values().iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(Error::ZeroNormCurve);
    }
    Ok((coeffs.weighted_energy() - energy).abs() / energy)
}
