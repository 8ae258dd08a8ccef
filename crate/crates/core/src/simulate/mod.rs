//! Synthetic data following the three simulation scenarios: clipped
//! sinusoidal component means, heteroscedastic autoregressive-variance noise,
//! optional onset shifts, and a quadratic single-index covariate effect.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::sindex::Covariates;
use crate::wavelet::{circular_shift, dyadic_levels, Curve};

/// Mixing proportions of the three classes.
pub const CLASS_WEIGHTS: [f64; 3] = [0.5, 0.25, 0.25];
const NOISE_SD: f64 = 0.2;

/// How a delayed onset is applied to a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftMode {
    /// Rotate the series; the tail wraps around to the start.
    #[default]
    Circular,
    /// Prepend zeros and drop the tail.
    Padded,
}

impl std::str::FromStr for ShiftMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circular" => Ok(ShiftMode::Circular),
            "padded" => Ok(ShiftMode::Padded),
            other => Err(Error::InvalidConfig(format!(
                "unknown shift mode `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// 1: shifts and covariates, 2: covariates only, 3: shifts only.
    pub scenario: u8,
    pub n: usize,
    pub len: usize,
    /// Contrast between the class means (and strength of the covariate link).
    pub varsigma: f64,
    pub shift: usize,
    pub shift_probability: f64,
    pub seed: u64,
    pub shift_mode: ShiftMode,
    /// Multiplies the noise; `0` gives noiseless curves.
    pub noise_scale: f64,
}

impl ScenarioConfig {
    pub fn new(scenario: u8, n: usize, seed: u64) -> Self {
        ScenarioConfig {
            scenario,
            n,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.scenario) {
            return Err(Error::InvalidScenario(self.scenario));
        }
        dyadic_levels(self.len)?;
        if self.n == 0 {
            return Err(Error::InvalidConfig("sample size must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.varsigma) {
            return Err(Error::InvalidConfig(format!(
                "varsigma {} outside [0, 1)",
                self.varsigma
            )));
        }
        if self.shift >= self.len {
            return Err(Error::InvalidConfig(format!(
                "shift {} not below series length {}",
                self.shift, self.len
            )));
        }
        if !(0.0..=1.0).contains(&self.shift_probability) {
            return Err(Error::InvalidConfig(
                "shift probability outside [0, 1]".into(),
            ));
        }
        if !(self.noise_scale >= 0.0) {
            return Err(Error::InvalidConfig(
                "noise scale must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn has_shifts(&self) -> bool {
        self.scenario != 2
    }

    pub fn has_covariate_effect(&self) -> bool {
        self.scenario != 3
    }

    /// True multiplicative effect `nu(a)` of index value `a`.
    pub fn link(&self, a: f64) -> f64 {
        if self.has_covariate_effect() {
            1.0 + self.varsigma * (a * a - 1.0)
        } else {
            1.0
        }
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: 1,
            n: 100,
            len: 256,
            varsigma: 0.3,
            shift: 50,
            shift_probability: 0.5,
            seed: 0,
            shift_mode: ShiftMode::Circular,
            noise_scale: 1.0,
        }
    }
}

/// One simulated data set with its ground truth.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub config: ScenarioConfig,
    pub curves: Vec<Curve>,
    pub covariates: Covariates,
    /// Classes `1..=3`.
    pub labels: Vec<usize>,
    pub shifts: Vec<usize>,
    pub gamma: [f64; 2],
}

impl Replicate {
    pub fn true_link(&self, a: f64) -> f64 {
        self.config.link(a)
    }

    /// `ln nu(a)`, the scale on which the regression estimates the link.
    pub fn true_log_link(&self, a: f64) -> f64 {
        self.config.link(a).ln()
    }
}

/// Value of class `class` (1..=3) at time `t` (1..=T).
pub fn component_mean(class: usize, t: usize, len: usize, varsigma: f64) -> f64 {
    let (a, b) = match class {
        1 => (1.0, 2.5),
        2 => (1.0 + varsigma, 2.5),
        _ => {
            let late = if 2 * t > len { 1.0 } else { 0.0 };
            (1.0 + varsigma * late, 2.5 - varsigma)
        }
    };
    let r = a * (b * std::f64::consts::PI * t as f64 / len as f64).sin();
    r.max(0.0)
}

/// Mean curve of `class` over `t = 1..=len`.
pub fn component_curve(class: usize, len: usize, varsigma: f64) -> Vec<f64> {
    (1..=len)
        .map(|t| component_mean(class, t, len, varsigma))
        .collect()
}

/// Conditional standard deviation of the next noise value given the previous one.
pub fn noise_conditional_sd(previous: f64) -> f64 {
    NOISE_SD + NOISE_SD * previous * previous
}

/// Noise path: `e_1 ~ N(0, 0.2^2)`, `e_t | e_{t-1} ~ N(0, (0.2 + 0.2 e_{t-1}^2)^2)`.
pub fn gen_noise<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut previous: Option<f64> = None;
    for _ in 0..len {
        let sd = previous.map_or(NOISE_SD, noise_conditional_sd);
        let z: f64 = StandardNormal.sample(rng);
        let e = sd * z;
        out.push(e);
        previous = Some(e);
    }
    out
}

pub fn gen_noise_seeded(len: usize, seed: u64) -> Vec<f64> {
    gen_noise(len, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Draws a class `1..=3` with probabilities (0.5, 0.25, 0.25).
pub fn draw_class<R: Rng + ?Sized>(rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, w) in CLASS_WEIGHTS.iter().enumerate() {
        acc += w;
        if u < acc {
            return k + 1;
        }
    }
    CLASS_WEIGHTS.len()
}

/// Delays `values` by `lag` samples.
pub fn apply_lag(values: &[f64], lag: usize, mode: ShiftMode) -> Vec<f64> {
    match mode {
        ShiftMode::Circular => {
            let c = Curve::new(values.to_vec()).expect("finite");
            circular_shift(&c, -(lag as i64)).into_values()
        }
        ShiftMode::Padded => {
            let lag = lag.min(values.len());
            let mut out = vec![0.0; lag];
            out.extend_from_slice(&values[..values.len() - lag]);
            out
        }
    }
}

/// SplitMix64 finalizer; used to derive independent per-replica seeds.
pub fn derive_seed(base: u64, stream: &[u64]) -> u64 {
    let mut state = base;
    for &part in stream {
        state = mix(state ^ mix(part.wrapping_add(0x9E37_79B9_7F4A_7C15)));
    }
    mix(state)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates one replicate of `config`.
pub fn gen_replicate(config: &ScenarioConfig) -> Result<Replicate> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gamma = [std::f64::consts::FRAC_1_SQRT_2; 2];
    let means: Vec<Vec<f64>> = (1..=3)
        .map(|k| component_curve(k, config.len, config.varsigma))
        .collect();
    let unit = Normal::new(0.0, 1.0).expect("valid normal");

    let mut curves = Vec::with_capacity(config.n);
    let mut labels = Vec::with_capacity(config.n);
    let mut shifts = Vec::with_capacity(config.n);
    let mut x = Array2::zeros((config.n, 2));
    for i in 0..config.n {
        let class = draw_class(&mut rng);
        let (x1, x2) = (unit.sample(&mut rng), unit.sample(&mut rng));
        let shifted: bool = rng.random::<f64>() < config.shift_probability;
        let lag = if config.has_shifts() && shifted {
            config.shift
        } else {
            0
        };
        let noise = gen_noise(config.len, &mut rng);
        let effect = config.link(gamma[0] * x1 + gamma[1] * x2);
        let base: Vec<f64> = means[class - 1]
            .iter()
            .zip(&noise)
            .map(|(u, e)| u + config.noise_scale * e)
            .collect();
        let values = apply_lag(&base, lag, config.shift_mode)
            .into_iter()
            .map(|v| effect * v)
            .collect();
        curves.push(Curve::new(values)?);
        labels.push(class);
        shifts.push(lag);
        x[[i, 0]] = x1;
        x[[i, 1]] = x2;
    }
    Ok(Replicate {
        config: config.clone(),
        curves,
        covariates: Covariates::from_matrix(x)?,
        labels,
        shifts,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::{featurize_ti, WaveletFilter};

    #[test]
    fn component_mean_values() {
        assert!((component_mean(1, 256, 256, 0.3) - 1.0).abs() < 1e-12);
        // sin(pi) at t = 0.4 T, clipped negative half-cycle after it
        assert!(component_mean(1, 100, 250, 0.3).abs() < 1e-12);
        for t in 103..=198 {
            assert_eq!(component_mean(1, t, 256, 0.3), 0.0);
        }
        for t in 1..=256 {
            let u1 = component_mean(1, t, 256, 0.3);
            assert!((component_mean(2, t, 256, 0.3) - 1.3 * u1).abs() < 1e-12);
            assert!(u1 >= 0.0);
        }
        // the third class is scaled only after mid-series
        let early = component_mean(3, 20, 256, 0.3);
        let r = (2.2 * std::f64::consts::PI * 20.0 / 256.0).sin();
        assert!((early - r).abs() < 1e-12);
    }

    #[test]
    fn degenerate_contrast() {
        for t in 1..=256 {
            let u = component_mean(1, t, 256, 0.0);
            assert_eq!(component_mean(2, t, 256, 0.0), u);
            assert_eq!(component_mean(3, t, 256, 0.0), u);
        }
    }

    #[test]
    fn noise_law() {
        assert_eq!(noise_conditional_sd(0.0), 0.2);
        assert_eq!(gen_noise_seeded(64, 5), gen_noise_seeded(64, 5));
        assert_ne!(gen_noise_seeded(64, 5), gen_noise_seeded(64, 6));
    }

    #[test]
    fn lags() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(
            apply_lag(&v, 1, ShiftMode::Circular),
            vec![4.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(
            apply_lag(&v, 1, ShiftMode::Padded),
            vec![0.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(apply_lag(&v, 0, ShiftMode::Padded), v.to_vec());
    }

    #[test]
    fn noiseless_scenario_two_recovers_means() {
        let cfg = ScenarioConfig {
            scenario: 2,
            n: 30,
            noise_scale: 0.0,
            seed: 9,
            ..ScenarioConfig::default()
        };
        let rep = gen_replicate(&cfg).unwrap();
        for i in 0..cfg.n {
            let idx: f64 = rep
                .covariates
                .row(i)
                .iter()
                .zip(&rep.gamma)
                .map(|(a, b)| a * b)
                .sum();
            let mu = rep.true_link(idx);
            let expect = component_curve(rep.labels[i], 256, 0.3);
            for (w, u) in rep.curves[i].values().iter().zip(&expect) {
                assert!((w / mu - u).abs() < 1e-12);
            }
            assert_eq!(rep.shifts[i], 0);
        }
    }

    #[test]
    fn circular_shift_keeps_noiseless_features() {
        let cfg = ScenarioConfig {
            scenario: 3,
            n: 40,
            noise_scale: 0.0,
            seed: 4,
            ..ScenarioConfig::default()
        };
        let rep = gen_replicate(&cfg).unwrap();
        let f = WaveletFilter::symmlet8();
        assert!(rep.shifts.contains(&50) && rep.shifts.contains(&0));
        for i in 0..cfg.n {
            let own = featurize_ti(&rep.curves[i], &f).unwrap();
            let base = Curve::new(component_curve(rep.labels[i], 256, 0.3)).unwrap();
            let reference = featurize_ti(&base, &f).unwrap();
            for (a, b) in own.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn reproducible_and_validated() {
        let cfg = ScenarioConfig::new(1, 10, 77);
        let a = gen_replicate(&cfg).unwrap();
        let b = gen_replicate(&cfg).unwrap();
        assert_eq!(a.curves, b.curves);
        assert_eq!(a.labels, b.labels);
        assert_eq!(
            gen_replicate(&ScenarioConfig::new(4, 10, 0)).unwrap_err(),
            Error::InvalidScenario(4)
        );
        let bad = ScenarioConfig {
            len: 200,
            ..ScenarioConfig::default()
        };
        assert_eq!(
            gen_replicate(&bad).unwrap_err(),
            Error::NonDyadicLength(200)
        );
        let bad = ScenarioConfig {
            shift: 256,
            ..ScenarioConfig::default()
        };
        assert!(matches!(gen_replicate(&bad), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn seeds_are_split() {
        let a = derive_seed(1, &[1, 100, 0]);
        let b = derive_seed(1, &[1, 100, 1]);
        let c = derive_seed(2, &[1, 100, 0]);
        assert!(a != b && a != c && b != c);
        assert_eq!(a, derive_seed(1, &[1, 100, 0]));
    }
}
