//! Raw series preparation: smoothing, population rates, dyadic truncation.

use crate::error::{Error, Result};

/// Trailing moving average. The first `window - 1` positions average over the
/// available prefix.
pub fn preprocess_ma(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if window == 0 {
        return Err(Error::InvalidConfig(
            "moving-average window must be at least 1".into(),
        ));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (t, &v) in series.iter().enumerate() {
        sum += v;
        if t >= window {
            sum -= series[t - window];
        }
        out.push(sum / (t + 1).min(window) as f64);
    }
    Ok(out)
}

/// Counts per million inhabitants.
pub fn normalize_rate(counts: &[f64], population: f64) -> Result<Vec<f64>> {
    if !(population > 0.0) || !population.is_finite() {
        return Err(Error::NonPositivePopulation(population));
    }
    let factor = 1e6 / population;
    Ok(counts.iter().map(|c| c * factor).collect())
}

/// Largest power of two not exceeding `len` (0 for an empty series).
pub fn dyadic_floor(len: usize) -> usize {
    if len == 0 {
        0
    } else {
        1 << len.ilog2()
    }
}

/// Keeps the latest `2^floor(log2 T)` samples.
pub fn truncate_to_dyadic(series: &[f64]) -> &[f64] {
    &series[series.len() - dyadic_floor(series.len())..]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moving_average_ramp() {
        let ramp: Vec<f64> = (1..=10).map(f64::from).collect();
        let out = preprocess_ma(&ramp, 3).unwrap();
        assert_eq!(out, vec![1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
    }

    #[test]
    fn moving_average_constant_and_impulse() {
        assert_eq!(preprocess_ma(&[2.5; 9], 4).unwrap(), vec![2.5; 9]);
        let mut impulse = vec![0.0; 20];
        impulse[8] = 1.0;
        let out = preprocess_ma(&impulse, 7).unwrap();
        for (t, v) in out.iter().enumerate() {
            let expected = if (8..15).contains(&t) { 1.0 / 7.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-15, "t={t}");
        }
    }

    #[test]
    fn moving_average_errors() {
        assert_eq!(preprocess_ma(&[], 3).unwrap_err(), Error::EmptySeries);
        assert!(preprocess_ma(&[1.0], 0).is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(normalize_rate(&[3.0, 7.0], 1e6).unwrap(), vec![3.0, 7.0]);
        assert_eq!(normalize_rate(&[3.0, 7.0], 2e6).unwrap(), vec![1.5, 3.5]);
        assert_eq!(normalize_rate(&[2.0, 4.0], 5e5).unwrap(), vec![4.0, 8.0]);
        assert_eq!(
            normalize_rate(&[1.0], 0.0).unwrap_err(),
            Error::NonPositivePopulation(0.0)
        );
        assert!(normalize_rate(&[1.0], -5.0).is_err());
    }

    #[test]
    fn dyadic_truncation_keeps_latest() {
        let s: Vec<f64> = (0..300).map(f64::from).collect();
        let t = truncate_to_dyadic(&s);
        assert_eq!(t.len(), 256);
        assert_eq!(t[0], 44.0);
        assert_eq!(truncate_to_dyadic(&s[..256]).len(), 256);
        assert_eq!(dyadic_floor(1), 1);
        assert_eq!(dyadic_floor(0), 0);
    }
}
