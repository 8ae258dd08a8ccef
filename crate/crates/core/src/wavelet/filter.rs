#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

// Low-pass taps refined to double precision against the orthonormality and
// vanishing-moment equations.
const SYM4: [f64; 8] = [
    0.032223100604051467872,
    -0.012603967262031303754,
    -0.099219543576633532585,
    0.2978577956053060514,
    0.80373875180513208088,
    0.49761866763277498998,
    -0.029635527646002491764,
    -0.075765714789502213228,
];

const SYM8: [f64; 16] = [
    0.0018899503327676891843,
    -0.00030292051472413308126,
    -0.014952258337062199118,
    0.0038087520138944894631,
    0.049137179673730286787,
    -0.027219029917103486322,
    -0.051945838107881800736,
    0.36444189483617893676,
    0.77718575169962802862,
    0.48135965125905339159,
    -0.061273359067811077843,
    -0.14329423835127266284,
    0.0076074873249766081919,
    0.031695087811525991431,
    -0.00054213233180001068935,
    -0.0033824159510050025955,
];

/// Orthonormal quadrature-mirror filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: String,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletFilter {
    /// Builds the pair from a low-pass filter; the high-pass is `g[k] = (-1)^k h[L-1-k]`.
    pub fn from_lowpass(name: impl Into<String>, lowpass: Vec<f64>) -> Self {
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        WaveletFilter {
            name: name.into(),
            lowpass,
            highpass,
        }
    }

    /// Symmlet with eight vanishing moments (16 taps). Default family.
    pub fn symmlet8() -> Self {
        Self::from_lowpass("sym8", SYM8.to_vec())
    }

    pub fn symmlet4() -> Self {
        Self::from_lowpass("sym4", SYM4.to_vec())
    }

    pub fn haar() -> Self {
        Self::from_lowpass("haar", HAAR.to_vec())
    }

    /// Looks a filter up by name: `sym8`, `sym4` or `haar`.
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "sym8" | "symmlet8" => Ok(Self::symmlet8()),
            "sym4" | "symmlet4" => Ok(Self::symmlet4()),
            "haar" => Ok(Self::haar()),
            _ => Err(Error::UnknownWavelet(name.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }
}

impl Default for WaveletFilter {
    fn default() -> Self {
        Self::symmlet8()
    }
}
