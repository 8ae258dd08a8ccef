use crate::error::{Error, Result};
use crate::sindex::gaussian;

/// Densities are floored here before taking logarithms.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// A univariate density tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub lo: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl DensityTable {
    /// A table of `values` on `lo, lo + step, ...`.
    pub fn new(lo: f64, step: f64, values: Vec<f64>) -> Self {
        DensityTable { lo, step, values }
    }

    /// Tabulates `f` on `size` points spanning `[lo, hi]`.
    pub fn tabulate(lo: f64, hi: f64, size: usize, f: impl Fn(f64) -> f64) -> Self {
        let step = (hi - lo) / (size - 1) as f64;
        let values = (0..size).map(|g| f(lo + g as f64 * step)).collect();
        DensityTable { lo, step, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.step * (self.values.len().saturating_sub(1)) as f64
    }

    pub fn point(&self, g: usize) -> f64 {
        self.lo + g as f64 * self.step
    }

    /// Trapezoid quadrature weights of the grid.
    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.values.len(), self.step)
    }

    /// Trapezoid integral of the tabulated values.
    pub fn integral(&self) -> f64 {
        self.weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }
}

pub(crate) fn trapezoid_weights(size: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; size];
    if let Some(first) = w.first_mut() {
        *first *= 0.5;
    }
    if size > 1 {
        w[size - 1] *= 0.5;
    }
    w
}

/// Normalized quadrature weights of the kernel `K_h(x - u_g)` on the grid:
/// `w_g K_h(x - u_g) / sum_g' w_g' K_h(x - u_g')`.
pub(crate) fn smoothing_weights(
    lo: f64,
    step: f64,
    quad: &[f64],
    x: f64,
    h: f64,
) -> Result<Vec<f64>> {
    let size = quad.len();
    let hi = lo + step * (size - 1) as f64;
    if !(x >= lo - step && x <= hi + step) {
        return Err(Error::GridMismatch(x));
    }
    let mut out: Vec<f64> = quad
        .iter()
        .enumerate()
        .map(|(g, w)| w * gaussian((x - (lo + g as f64 * step)) / h))
        .collect();
    let total: f64 = out.iter().sum();
    if !(total > 0.0) {
        return Err(Error::GridMismatch(x));
    }
    out.iter_mut().for_each(|v| *v /= total);
    Ok(out)
}

/// `ln N g(x) = int K_h(x - u) ln g(u) du`, by quadrature on the table's grid.
pub fn log_smooth_density(table: &DensityTable, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidBandwidth(h));
    }
    let weights = smoothing_weights(table.lo, table.step, &table.weights(), x, h)?;
    Ok(weights
        .iter()
        .zip(&table.values)
        .map(|(w, v)| w * v.max(DENSITY_FLOOR).ln())
        .sum())
}

/// The nonlinear smoothing `N g(x) = exp{ int K_h(x - u) ln g(u) du }`.
pub fn smooth_density(table: &DensityTable, x: f64, h: f64) -> Result<f64> {
    log_smooth_density(table, x, h).map(f64::exp)
}

/// The linear smoothing `(K_h * g)(x)` with the same quadrature weights.
pub fn convolve_density(table: &DensityTable, x: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidBandwidth(h));
    }
    let weights = smoothing_weights(table.lo, table.step, &table.weights(), x, h)?;
    Ok(weights.iter().zip(&table.values).map(|(w, v)| w * v).sum())
}
