use super::{Curve, WaveletFilter};
use crate::error::{Error, Result};

/// Orthogonal DWT pyramid.
///
/// `details[0]` holds the coarsest retained scale `j0 = J - levels` (length `2^j0`),
/// the last entry the finest scale `J - 1` (length `T/2`). `scaling` has length `2^j0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DwtCoefficients {
    pub scaling: Vec<f64>,
    pub details: Vec<Vec<f64>>,
}

impl DwtCoefficients {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Coarsest detail scale index `j0`.
    pub fn coarsest_scale(&self) -> usize {
        self.scaling.len().trailing_zeros() as usize
    }

    /// Detail coefficients at dyadic scale `j` (`2^j` entries), if retained.
    pub fn detail_at_scale(&self, j: usize) -> Option<&[f64]> {
        j.checked_sub(self.coarsest_scale())
            .and_then(|idx| self.details.get(idx))
            .map(Vec::as_slice)
    }

    pub fn total_len(&self) -> usize {
        self.scaling.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.scaling
            .iter()
            .chain(self.details.iter().flatten())
            .map(|c| c * c)
            .sum()
    }
}

/// One analysis step with periodic boundary: `a'[m] = sum_k h[k] a[(2m+k) mod N]`.
pub(super) fn analysis_step(signal: &[f64], filter: &WaveletFilter) -> (Vec<f64>, Vec<f64>) {
    let len = signal.len();
    let half = len / 2;
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for m in 0..half {
        let (mut a, mut d) = (0.0, 0.0);
        for k in 0..h.len() {
            let x = signal[(2 * m + k) % len];
            a += h[k] * x;
            d += g[k] * x;
        }
        approx[m] = a;
        detail[m] = d;
    }
    (approx, detail)
}

fn synthesis_step(approx: &[f64], detail: &[f64], filter: &WaveletFilter) -> Vec<f64> {
    let len = approx.len() * 2;
    let (h, g) = (filter.lowpass(), filter.highpass());
    let mut out = vec![0.0; len];
    for m in 0..approx.len() {
        for k in 0..h.len() {
            out[(2 * m + k) % len] += h[k] * approx[m] + g[k] * detail[m];
        }
    }
    out
}

/// Mallat pyramid with circular convolution, `levels` steps deep.
pub fn dwt_forward(
    curve: &Curve,
    filter: &WaveletFilter,
    levels: usize,
) -> Result<DwtCoefficients> {
    let max = curve.dyadic_levels()?;
    if levels == 0 || levels > max {
        return Err(Error::InvalidLevels { levels, max });
    }
    let mut approx = curve.values().to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, filter);
        details.push(d);
        approx = a;
    }
    details.reverse();
    Ok(DwtCoefficients {
        scaling: approx,
        details,
    })
}

pub fn dwt_inverse(coeffs: &DwtCoefficients, filter: &WaveletFilter) -> Result<Curve> {
    let mut size = coeffs.scaling.len();
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::InconsistentPyramid(format!(
            "scaling band of length {size}"
        )));
    }
    let mut approx = coeffs.scaling.clone();
    for (idx, detail) in coeffs.details.iter().enumerate() {
        if detail.len() != size {
            return Err(Error::InconsistentPyramid(format!(
                "detail band {idx} has length {}, expected {size}",
                detail.len()
            )));
        }
        approx = synthesis_step(&approx, detail, filter);
        size *= 2;
    }
    Curve::new(approx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_curve(rng: &mut ChaCha8Rng, len: usize) -> Curve {
        Curve::new((0..len).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap()
    }

    #[test]
    fn constant_curve_has_no_details() {
        let c = Curve::new(vec![2.0; 8]).unwrap();
        for f in [WaveletFilter::haar(), WaveletFilter::symmlet8()] {
            let coeffs = dwt_forward(&c, &f, 3).unwrap();
            assert_eq!(coeffs.scaling.len(), 1);
            assert!((coeffs.scaling[0] - 2.0 * 8f64.sqrt()).abs() < 1e-10);
            assert!(coeffs.details.iter().flatten().all(|d| d.abs() < 1e-10));
            let back = dwt_inverse(&coeffs, &f).unwrap();
            assert!(back.values().iter().all(|v| (v - 2.0).abs() < 1e-10));
        }
    }

    #[test]
    fn pyramid_shape() {
        let c = Curve::new(vec![1.0; 64]).unwrap();
        let coeffs = dwt_forward(&c, &WaveletFilter::symmlet8(), 6).unwrap();
        assert_eq!(coeffs.total_len(), 64);
        for j in 0..6 {
            assert_eq!(coeffs.detail_at_scale(j).unwrap().len(), 1 << j);
        }
        let partial = dwt_forward(&c, &WaveletFilter::symmlet8(), 2).unwrap();
        assert_eq!(partial.scaling.len(), 16);
        assert_eq!(partial.coarsest_scale(), 4);
        assert!(partial.detail_at_scale(3).is_none());
        assert_eq!(partial.detail_at_scale(5).unwrap().len(), 32);
    }

    #[test]
    fn round_trip_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = WaveletFilter::symmlet8();
        for len in [16usize, 64, 256] {
            let c = random_curve(&mut rng, len);
            for levels in 1..=len.trailing_zeros() as usize {
                let coeffs = dwt_forward(&c, &f, levels).unwrap();
                let rel = (coeffs.norm_sqr().sqrt() - c.norm()).abs() / c.norm();
                assert!(rel < 1e-10);
                let back = dwt_inverse(&coeffs, &f).unwrap();
                let err = back
                    .values()
                    .iter()
                    .zip(c.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(err < 1e-10, "len {len} levels {levels}: {err}");
            }
        }
    }

    #[test]
    fn zero_coefficients_give_zero_curve() {
        let coeffs = DwtCoefficients {
            scaling: vec![0.0],
            details: vec![vec![0.0], vec![0.0; 2], vec![0.0; 4]],
        };
        let c = dwt_inverse(&coeffs, &WaveletFilter::symmlet8()).unwrap();
        assert_eq!(c.values(), &[0.0; 8]);
    }

    #[test]
    fn error_paths() {
        let f = WaveletFilter::haar();
        let bad = Curve::new(vec![1.0; 12]).unwrap();
        assert_eq!(
            dwt_forward(&bad, &f, 1).unwrap_err(),
            Error::NonDyadicLength(12)
        );
        let ok = Curve::new(vec![1.0; 8]).unwrap();
        assert!(matches!(
            dwt_forward(&ok, &f, 4),
            Err(Error::InvalidLevels { levels: 4, max: 3 })
        ));
        assert!(matches!(
            dwt_forward(&ok, &f, 0),
            Err(Error::InvalidLevels { .. })
        ));
        let broken = DwtCoefficients {
            scaling: vec![1.0],
            details: vec![vec![0.0; 2]],
        };
        assert!(matches!(
            dwt_inverse(&broken, &f),
            Err(Error::InconsistentPyramid(_))
        ));
    }
}
