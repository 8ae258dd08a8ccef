use crate::error::{Error, Result};

/// Denominators at or below this are treated as an empty neighbourhood.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard Gaussian density.
#[inline]
pub fn gaussian(t: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * t * t).exp()
}

/// Empirical standard deviation with the `n - 1` denominator.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n as f64 - 1.0)).sqrt()
}

/// Rule-of-thumb bandwidth `C n^{-1/5}`.
pub fn rule_of_thumb(constant: f64, n: usize) -> f64 {
    constant * (n as f64).powf(-0.2)
}

/// Nadaraya-Watson estimate at `u` of `response` regressed on `index`, Gaussian kernel.
pub fn nadaraya_watson(index: &[f64], response: &[f64], bandwidth: f64, u: f64) -> Result<f64> {
    nadaraya_watson_excluding(index, response, bandwidth, u, None)
}

pub(crate) fn nadaraya_watson_excluding(
    index: &[f64],
    response: &[f64],
    bandwidth: f64,
    u: f64,
    skip: Option<usize>,
) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, (&x, &y)) in index.iter().zip(response).enumerate() {
        if Some(i) == skip {
            continue;
        }
        let w = gaussian((x - u) / bandwidth);
        num += w * y;
        den += w;
    }
    if den <= DENOMINATOR_FLOOR || !den.is_finite() {
        return Err(Error::EmptyNeighborhood(u));
    }
    Ok(num / den)
}
