use ndarray::Array2;

use super::density::{
    log_smooth_density, smoothing_weights, trapezoid_weights, DensityTable, DENSITY_FLOOR,
};
use super::kmeans::kmeans;
use crate::error::{Error, Result};
use crate::sindex::{rule_of_thumb, std_dev};

/// Proportions below this mark a component as empty.
const EMPTY_PROPORTION: f64 = 1e-8;

/// Row-stochastic responsibilities `t_{il}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Posteriors(pub Array2<f64>);

impl Posteriors {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn components(&self) -> usize {
        self.0.ncols()
    }
}

/// Hard cluster labels, `1..=L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition(pub Vec<usize>);

impl Partition {
    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How initial responsibilities are produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    /// Softened k-means partition of the rows (0.9 on the assigned component).
    #[default]
    KMeans,
    /// Caller-provided responsibilities, `n x L`.
    Posteriors(Array2<f64>),
}

#[derive(Debug, Clone)]
pub struct MixtureOptions {
    /// Per-column bandwidths; defaults to `sd_j n^{-1/5}`.
    pub bandwidths: Option<Vec<f64>>,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the objective changes by less than this.
    pub tol: f64,
    pub grid_size: usize,
    /// Fresh seeded starts allowed after a component empties.
    pub restarts: usize,
    pub kmeans_restarts: usize,
    pub init: Init,
}

impl Default for MixtureOptions {
    fn default() -> Self {
        MixtureOptions {
            bandwidths: None,
            seed: 0,
            max_iter: 500,
            tol: 1e-8,
            grid_size: 512,
            restarts: 5,
            kmeans_restarts: 10,
            init: Init::KMeans,
        }
    }
}

/// A fitted mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    pub proportions: Vec<f64>,
    /// `tables[l][j]`: density of feature `j` in component `l`.
    pub tables: Vec<Vec<DensityTable>>,
    pub bandwidths: Vec<f64>,
    /// Final smoothed log-likelihood.
    pub loglik: f64,
    pub iterations: usize,
    /// Objective after every MM iteration.
    pub trace: Vec<f64>,
}

impl MixtureModel {
    pub fn components(&self) -> usize {
        self.proportions.len()
    }

    pub fn features(&self) -> usize {
        self.bandwidths.len()
    }

    /// Reorders components: new component `k` is old component `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> MixtureModel {
        MixtureModel {
            proportions: order.iter().map(|&k| self.proportions[k]).collect(),
            tables: order.iter().map(|&k| self.tables[k].clone()).collect(),
            ..self.clone()
        }
    }

    /// `ln pi_l + sum_j ln N g_lj(x_ij)` for every row and component.
    fn log_terms(&self, data: &Array2<f64>) -> Result<Array2<f64>> {
        if data.ncols() != self.features() {
            return Err(Error::DimensionMismatch(format!(
                "{} residual columns for a model over {} features",
                data.ncols(),
                self.features()
            )));
        }
        let mut out = Array2::zeros((data.nrows(), self.components()));
        for ((i, l), cell) in out.indexed_iter_mut() {
            let mut acc = self.proportions[l].ln();
            for (j, table) in self.tables[l].iter().enumerate() {
                acc += log_smooth_density(table, data[[i, j]], self.bandwidths[j])?;
            }
            *cell = acc;
        }
        Ok(out)
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Normalizes log-terms row-wise in log space; returns the objective too.
fn normalize_rows(terms: &Array2<f64>) -> (Array2<f64>, f64) {
    let mut post = terms.clone();
    let mut objective = 0.0;
    for mut row in post.rows_mut() {
        let lse = log_sum_exp(row.iter().copied());
        objective += lse;
        row.mapv_inplace(|v| (v - lse).exp());
    }
    (post, objective)
}

/// Smoothed log-likelihood `sum_i ln sum_l pi_l prod_j N g_lj(x_ij)`.
pub fn smoothed_loglik(model: &MixtureModel, residuals: &Array2<f64>) -> Result<f64> {
    let terms = model.log_terms(residuals)?;
    Ok(terms
        .rows()
        .into_iter()
        .map(|row| log_sum_exp(row.iter().copied()))
        .sum())
}

/// Posterior membership probabilities, computed in log space.
pub fn posteriors(model: &MixtureModel, residuals: &Array2<f64>) -> Result<Posteriors> {
    let terms = model.log_terms(residuals)?;
    Ok(Posteriors(normalize_rows(&terms).0))
}

/// Maximum a posteriori labels (`1..=L`); ties go to the lowest component.
pub fn map_assign(post: &Posteriors) -> Partition {
    Partition(
        post.0
            .rows()
            .into_iter()
            .map(|row| {
                let mut best = 0;
                for (l, v) in row.iter().enumerate() {
                    if *v > row[best] {
                        best = l;
                    }
                }
                best + 1
            })
            .collect(),
    )
}

/// `sd_j n^{-1/5}` for every column.
pub fn default_bandwidths(residuals: &Array2<f64>) -> Vec<f64> {
    let n = residuals.nrows();
    residuals
        .columns()
        .into_iter()
        .map(|c| rule_of_thumb(std_dev(&c.to_vec()), n))
        .collect()
}

/// Per-column grid and the normalized kernel weights of every observation on it.
struct ColumnGrid {
    lo: f64,
    step: f64,
    quad: Vec<f64>,
    /// `n x G`, each row sums to one.
    weights: Array2<f64>,
}

impl ColumnGrid {
    fn build(column: &[f64], h: f64, size: usize) -> Result<Self> {
        let min = column.iter().copied().fold(f64::INFINITY, f64::min);
        let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = min - 3.0 * h;
        let step = (max + 3.0 * h - lo) / (size - 1) as f64;
        let quad = trapezoid_weights(size, step);
        let mut weights = Array2::zeros((column.len(), size));
        for (i, &x) in column.iter().enumerate() {
            let w = smoothing_weights(lo, step, &quad, x, h)?;
            weights.row_mut(i).assign(&ndarray::Array1::from(w));
        }
        Ok(ColumnGrid {
            lo,
            step,
            quad,
            weights,
        })
    }
}

fn initial_posteriors(
    residuals: &Array2<f64>,
    l: usize,
    opts: &MixtureOptions,
    seed: u64,
) -> Result<Array2<f64>> {
    let n = residuals.nrows();
    match &opts.init {
        Init::Posteriors(t) => {
            if t.dim() != (n, l) {
                return Err(Error::DimensionMismatch(format!(
                    "initial posteriors {:?}, expected ({n}, {l})",
                    t.dim()
                )));
            }
            Ok(t.clone())
        }
        Init::KMeans => {
            if l == 1 {
                return Ok(Array2::ones((n, 1)));
            }
            let labels = kmeans(residuals, l, opts.kmeans_restarts, seed);
            let off = 0.1 / (l - 1) as f64;
            Ok(Array2::from_shape_fn((n, l), |(i, k)| {
                if labels[i] == k {
                    0.9
                } else {
                    off
                }
            }))
        }
    }
}

fn run_mm(
    grids: &[ColumnGrid],
    bandwidths: &[f64],
    mut post: Array2<f64>,
    opts: &MixtureOptions,
) -> Result<(MixtureModel, Posteriors)> {
    let (n, l) = post.dim();
    let size = opts.grid_size;
    let mut trace = Vec::new();
    let mut model = None;
    for _ in 0..opts.max_iter.max(1) {
        // M-step: proportions and posterior-weighted kernel densities
        let mass: Vec<f64> = (0..l).map(|k| post.column(k).sum()).collect();
        let proportions: Vec<f64> = mass.iter().map(|m| m / n as f64).collect();
        if let Some(k) = proportions.iter().position(|p| !(*p >= EMPTY_PROPORTION)) {
            return Err(Error::EmptyComponent(k + 1));
        }
        let mut tables = vec![Vec::with_capacity(grids.len()); l];
        let mut log_tables = vec![Vec::with_capacity(grids.len()); l];
        for grid in grids {
            let dens = post.t().dot(&grid.weights);
            for k in 0..l {
                let values: Vec<f64> = dens
                    .row(k)
                    .iter()
                    .zip(&grid.quad)
                    .map(|(a, w)| a / (w * mass[k]))
                    .collect();
                log_tables[k].push(ndarray::Array1::from_iter(
                    values.iter().map(|v| v.max(DENSITY_FLOOR).ln()),
                ));
                tables[k].push(DensityTable::new(grid.lo, grid.step, values));
            }
        }
        debug_assert!(tables.iter().flatten().all(|t| t.len() == size));

        // smoothed log terms, objective and E-step
        let mut terms = Array2::from_shape_fn((n, l), |(_, k)| proportions[k].ln());
        for (j, grid) in grids.iter().enumerate() {
            for k in 0..l {
                let contrib = grid.weights.dot(&log_tables[k][j]);
                terms.column_mut(k).zip_mut_with(&contrib, |t, c| *t += c);
            }
        }
        let (next, objective) = normalize_rows(&terms);
        let previous = trace.last().copied();
        trace.push(objective);
        post = next;
        model = Some(MixtureModel {
            proportions,
            tables,
            bandwidths: bandwidths.to_vec(),
            loglik: objective,
            iterations: trace.len(),
            trace: Vec::new(),
        });
        if previous.is_some_and(|p| (objective - p).abs() < opts.tol) {
            break;
        }
    }
    let mut model = model.expect("at least one iteration");
    model.trace = trace;
    Ok((model, Posteriors(post)))
}

/// Fits an `L`-component mixture to the residual rows.
pub fn fit_mixture(
    residuals: &Array2<f64>,
    l: usize,
    opts: &MixtureOptions,
) -> Result<(MixtureModel, Posteriors)> {
    let (n, p) = residuals.dim();
    if l == 0 || l > n {
        return Err(Error::InvalidL { l, n });
    }
    if p == 0 {
        return Err(Error::EmptyInput("residual matrix has no columns".into()));
    }
    if let Some(pos) = residuals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(pos));
    }
    if opts.grid_size < 2 {
        return Err(Error::InvalidConfig(
            "density grid needs at least two points".into(),
        ));
    }
    let bandwidths = match &opts.bandwidths {
        Some(h) if h.len() != p => {
            return Err(Error::DimensionMismatch(format!(
                "{} bandwidths for {p} columns",
                h.len()
            )))
        }
        Some(h) => h.clone(),
        None => default_bandwidths(residuals),
    };
    if let Some(h) = bandwidths.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(Error::InvalidBandwidth(*h));
    }
    let grids: Vec<ColumnGrid> = residuals
        .columns()
        .into_iter()
        .zip(&bandwidths)
        .map(|(c, &h)| ColumnGrid::build(&c.to_vec(), h, opts.grid_size))
        .collect::<Result<_>>()?;

    let attempts = if matches!(opts.init, Init::KMeans) {
        opts.restarts.max(1)
    } else {
        1
    };
    let mut last_err = Error::EmptyComponent(0);
    for attempt in 0..attempts {
        let seed = opts.seed.wrapping_add(attempt as u64 * 0x9E37_79B9);
        let start = initial_posteriors(residuals, l, opts, seed)?;
        match run_mm(&grids, &bandwidths, start, opts) {
            Ok(fit) => return Ok(fit),
            Err(e @ Error::EmptyComponent(_)) => {
                log::warn!("mixture fit attempt {attempt} failed: {e}");
                last_err = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn two_groups(n: usize, gap: f64, seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<usize> = (0..n).map(|i| 1 + (i % 2)).collect();
        let data = Array2::from_shape_fn((n, 3), |(i, _)| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z + if truth[i] == 2 { gap } else { 0.0 }
        });
        (data, truth)
    }

    #[test]
    fn single_component() {
        let (data, _) = two_groups(40, 0.0, 1);
        let (model, post) = fit_mixture(&data, 1, &MixtureOptions::default()).unwrap();
        assert_eq!(model.proportions, vec![1.0]);
        assert!(post.0.iter().all(|t| *t == 1.0));
        let mut direct = 0.0;
        for i in 0..data.nrows() {
            for j in 0..data.ncols() {
                direct +=
                    log_smooth_density(&model.tables[0][j], data[[i, j]], model.bandwidths[j])
                        .unwrap();
            }
        }
        assert!((model.loglik - direct).abs() < 1e-9 * direct.abs());
    }

    #[test]
    fn invariants_after_fit() {
        let (data, _) = two_groups(60, 3.0, 2);
        let (model, post) = fit_mixture(&data, 2, &MixtureOptions::default()).unwrap();
        assert!((model.proportions.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for row in post.0.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|t| (0.0..=1.0).contains(t)));
        }
        for table in model.tables.iter().flatten() {
            assert!((table.integral() - 1.0).abs() < 1e-6);
            assert!(table.values.iter().all(|v| *v >= 0.0));
        }
        for (j, col) in data.columns().into_iter().enumerate() {
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let t = &model.tables[0][j];
            assert!(t.lo <= min - 3.0 * model.bandwidths[j] + 1e-9);
            assert!(t.hi() >= max + 3.0 * model.bandwidths[j] - 1e-9);
        }
        for w in model.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-8);
        }
        assert!(model.trace.last().unwrap() >= model.trace.first().unwrap());
        let re = smoothed_loglik(&model, &data).unwrap();
        assert!((re - model.loglik).abs() < 1e-9 * re.abs());
    }

    #[test]
    fn map_ties_and_examples() {
        let post = Posteriors(ndarray::array![
            [0.9, 0.1],
            [0.5, 0.5],
            [0.2, 0.8],
            [0.3, 0.3,]
        ]);
        assert_eq!(map_assign(&post).0, vec![1, 1, 2, 1]);
    }

    #[test]
    fn identical_components_give_uniform_posteriors() {
        let (data, _) = two_groups(20, 1.0, 3);
        let (model, _) = fit_mixture(&data, 1, &MixtureOptions::default()).unwrap();
        let twin = MixtureModel {
            proportions: vec![0.5, 0.5],
            tables: vec![model.tables[0].clone(), model.tables[0].clone()],
            ..model.clone()
        };
        let post = posteriors(&twin, &data).unwrap();
        assert!(post.0.iter().all(|t| (t - 0.5).abs() < 1e-14));
    }

    #[test]
    fn density_ratio_posterior() {
        let flat = DensityTable::tabulate(-1.0, 1.0, 101, |_| 0.5);
        let low = DensityTable::tabulate(-1.0, 1.0, 101, |_| 0.005);
        let model = MixtureModel {
            proportions: vec![0.5, 0.5],
            tables: vec![vec![flat], vec![low]],
            bandwidths: vec![0.2],
            loglik: 0.0,
            iterations: 0,
            trace: vec![],
        };
        let post = posteriors(&model, &ndarray::array![[0.1]]).unwrap();
        assert!((post.0[[0, 0]] - 100.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let (data, _) = two_groups(5, 0.0, 4);
        assert_eq!(
            fit_mixture(&data, 0, &MixtureOptions::default()).unwrap_err(),
            Error::InvalidL { l: 0, n: 5 }
        );
        assert_eq!(
            fit_mixture(&data, 6, &MixtureOptions::default()).unwrap_err(),
            Error::InvalidL { l: 6, n: 5 }
        );
        let opts = MixtureOptions {
            bandwidths: Some(vec![0.1]),
            ..MixtureOptions::default()
        };
        assert!(matches!(
            fit_mixture(&data, 2, &opts),
            Err(Error::DimensionMismatch(_))
        ));
        let (model, _) = fit_mixture(&data, 1, &MixtureOptions::default()).unwrap();
        let far = Array2::from_elem((1, 3), 1e6);
        assert!(matches!(
            smoothed_loglik(&model, &far),
            Err(Error::GridMismatch(_))
        ));
        // a component with no mass is reported
        let init = Array2::from_shape_fn((5, 2), |(_, k)| if k == 0 { 1.0 } else { 0.0 });
        let opts = MixtureOptions {
            init: Init::Posteriors(init),
            ..MixtureOptions::default()
        };
        assert_eq!(
            fit_mixture(&data, 2, &opts).unwrap_err(),
            Error::EmptyComponent(2)
        );
    }
}
